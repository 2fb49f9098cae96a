#pragma once

// Exact-arithmetic reference for the ratio statistics. Evaluates the double sums
// literally, with no shared code path with the library scan.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "ratiocp/cusum.hpp"

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

inline Rational exact(double v) { return Rational(v); }

inline Rational reduce(const std::vector<Rational>& s, ratiocp::Functional f, std::size_t len) {
    Rational mx = s.front(), mn = s.front(), sum = 0, sum_sq = 0;
    for (const auto& v : s) {
        if (v > mx) mx = v;
        if (v < mn) mn = v;
        sum += v;
        sum_sq += v * v;
    }
    switch (f) {
        case ratiocp::Functional::MaxAbs: return mx > -mn ? mx : Rational(-mn);
        case ratiocp::Functional::Range: return mx - mn;
        case ratiocp::Functional::VarType: return sum_sq - sum * sum / Rational(len);
    }
    return 0;
}

/// sum_{j<=i} (x_j - mean(x_1..x_k)) for i = 1..k, each partial sum recomputed from scratch.
inline Rational forward(const std::vector<Rational>& x, std::size_t k, ratiocp::Functional f) {
    Rational mean = 0;
    for (std::size_t j = 0; j < k; ++j) mean += x[j];
    mean /= Rational(k);
    std::vector<Rational> s;
    for (std::size_t i = 1; i <= k; ++i) {
        Rational acc = 0;
        for (std::size_t j = 1; j <= i; ++j) acc += x[j - 1] - mean;
        s.push_back(acc);
    }
    return reduce(s, f, k);
}

/// sum_{j>=i} (x_j - mean(x_{k+1}..x_n)) for i = k+1..n.
inline Rational backward(const std::vector<Rational>& x, std::size_t k, ratiocp::Functional f) {
    const std::size_t n = x.size();
    Rational mean = 0;
    for (std::size_t j = k + 1; j <= n; ++j) mean += x[j - 1];
    mean /= Rational(n - k);
    std::vector<Rational> r;
    for (std::size_t i = k + 1; i <= n; ++i) {
        Rational acc = 0;
        for (std::size_t j = i; j <= n; ++j) acc += x[j - 1] - mean;
        r.push_back(acc);
    }
    return reduce(r, f, n - k);
}

struct Sup {
    bool infinite = false;
    Rational value = 0;
    std::size_t argmax_k = 0;

    double as_double() const {
        return infinite ? std::numeric_limits<double>::infinity() : value.convert_to<double>();
    }
};

/// sup over k in [lo, hi] of forward/backward (V) or backward/forward (Z); smallest k on ties.
inline std::optional<Sup> scan(const std::vector<double>& xs, std::size_t lo, std::size_t hi,
                               ratiocp::Functional f, bool z_orientation) {
    std::vector<Rational> x;
    for (double v : xs) x.push_back(exact(v));
    std::optional<Sup> best;
    for (std::size_t k = lo; k <= hi; ++k) {
        Rational num = forward(x, k, f), den = backward(x, k, f);
        if (z_orientation) std::swap(num, den);
        Sup cand;
        cand.argmax_k = k;
        if (den > 0) {
            cand.value = num / den;
        } else if (num > 0) {
            cand.infinite = true;
        } else {
            continue;
        }
        const bool better = !best || (cand.infinite && !best->infinite) ||
                            (!cand.infinite && !best->infinite && cand.value > best->value);
        if (better) best = cand;
    }
    return best;
}

}  // namespace oracle

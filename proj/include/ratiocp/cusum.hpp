#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ratiocp {

/// Ordered observations X_1..X_n. Holds at least two finite values.
class Series {
public:
    explicit Series(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    /// 0-based access; observation X_k is `(*this)[k - 1]`.
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    Series reversed() const;

    friend bool operator==(const Series&, const Series&) = default;

private:
    std::vector<double> values_;
};

/// Trimming fraction delta in the open interval (0, 1/2).
class TrimFraction {
public:
    explicit TrimFraction(double delta);

    double value() const noexcept { return delta_; }

    friend bool operator==(const TrimFraction&, const TrimFraction&) = default;

private:
    double delta_;
};

/// V: forward/backward, Z: backward/forward, TMax: max of both,
/// Classical: CUSUM functional scaled by a long-run variance estimate.
enum class Family { V, Z, TMax, Classical };

enum class Functional {
    MaxAbs,   ///< sup |S|
    Range,    ///< sup S - inf S
    VarType,  ///< sum S^2 - (sum S)^2 / length
};

struct StatKind {
    Family family = Family::V;
    Functional functional = Functional::MaxAbs;

    friend bool operator==(const StatKind&, const StatKind&) = default;
};

/// Short names used on the command line and in files: v1..v3, z1..z3, tmax1..tmax3, t1..t3.
std::string to_string(StatKind kind);
std::string_view to_string(Functional functional) noexcept;
/// Throws std::invalid_argument on an unknown name.
StatKind parse_stat_kind(std::string_view name);
std::array<StatKind, 12> all_stat_kinds() noexcept;

/// Closed interval of candidate change points, 1-based.
struct KRange {
    std::size_t lo = 0;
    std::size_t hi = 0;

    std::size_t size() const noexcept { return hi >= lo ? hi - lo + 1 : 0; }
};

/// [ceil(n delta), floor(n (1 - delta))] clamped to [1, n-1]. Throws Error(EmptyRange).
KRange k_range(std::size_t n, TrimFraction delta);

/// Functional of the centered partial sums of X_1..X_k (1 <= k <= n-1).
double forward_functional(const Series& x, std::size_t k, Functional functional);

/// Functional of the centered tail sums of X_{k+1}..X_n (1 <= k <= n-1).
double backward_functional(const Series& x, std::size_t k, Functional functional);

/// forward_functional for every k at once in O(n log n).
/// Returns a vector indexed by k = 0..n; entry 0 is 0.
std::vector<double> forward_profile(std::span<const double> x, Functional functional);

/// backward_functional for every k, indexed by k = 0..n; entry n is 0.
/// Computed as the forward profile of the reversed series read at n - k.
std::vector<double> backward_profile(std::span<const double> x, Functional functional);

/// Per-k ratio values over the trimmed range. Undefined (0/0) entries hold NaN;
/// a positive numerator over a zero denominator gives +infinity.
struct RatioCurve {
    std::vector<std::size_t> k_values;
    std::vector<double> numerators;
    std::vector<double> denominators;
    std::vector<double> ratios;
    std::size_t argmax_k = 0;
    double sup_value = 0.0;

    bool defined(std::size_t j) const noexcept { return ratios[j] == ratios[j]; }
};

/// orientation must be Family::V or Family::Z. Throws Error(AllDegenerate).
RatioCurve ratio_scan(const Series& x, TrimFraction delta, Functional functional,
                      Family orientation);

struct StatResult {
    double value = 0.0;
    std::size_t argmax_k = 0;
    /// The V curve for V/TMax, the Z curve for Z.
    RatioCurve curve;
    /// The Z curve, TMax only.
    std::optional<RatioCurve> second_curve;
};

/// V, Z and TMax statistics; Classical kinds need a variance estimate, see classical_statistic.
StatResult statistic(const Series& x, TrimFraction delta, StatKind kind);

struct LongRunVariance {
    double sigma2_hat = 0.0;
    std::size_t bandwidth = 0;
};

/// floor(n^(1/3)).
std::size_t default_bandwidth(std::size_t n) noexcept;

/// Bartlett-kernel long-run variance of the demeaned series (autocovariances divided by n).
LongRunVariance bartlett_lrv(const Series& x, std::size_t bandwidth);

/// CUSUM statistics of the whole sample scaled by n sigma^2 (T1, T2) or n^2 sigma^2 (T3).
/// Throws Error(ZeroVariance).
double classical_statistic(const Series& x, Functional functional, const LongRunVariance& lrv);

}  // namespace ratiocp

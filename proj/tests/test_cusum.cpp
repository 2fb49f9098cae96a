#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "ratiocp/cusum.hpp"
#include "ratiocp/error.hpp"
#include "support/rational_oracle.hpp"

using namespace ratiocp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Series series(std::vector<double> v) { return Series(std::move(v)); }

const std::vector<double> kTen{0.5, -1.25, 2.0, 0.75, -0.5, 1.5, -2.25, 0.25, 1.0, -0.75};

std::vector<double> twenty() {
    const int raw[] = {3, -7, 12, 5, -1, -9, 4, 8, -3, 0, 6, -12, 2, 7, -5, 1, 10, -4, -6, 9};
    std::vector<double> x;
    for (int v : raw) x.push_back(v / 8.0);
    return x;
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> d;
    std::vector<double> x(n);
    for (auto& v : x) v = d(gen);
    return x;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected ratiocp::Error");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("series and trim fraction invariants") {
    CHECK(code_of([] { Series({1.0}); }) == ErrorCode::TooShort);
    CHECK(code_of([] { Series({1.0, std::nan("")}); }) == ErrorCode::InvalidSeries);
    CHECK_THROWS_AS(TrimFraction(0.0), std::invalid_argument);
    CHECK_THROWS_AS(TrimFraction(0.5), std::invalid_argument);
    CHECK_THROWS_AS(TrimFraction(0.6), std::invalid_argument);
    CHECK(TrimFraction(0.49).value() == 0.49);
}

TEST_CASE("stat kind names") {
    CHECK(all_stat_kinds().size() == 12);
    for (StatKind kind : all_stat_kinds()) CHECK(parse_stat_kind(to_string(kind)) == kind);
    CHECK(to_string(StatKind{Family::TMax, Functional::Range}) == "tmax2");
    CHECK_THROWS_AS(parse_stat_kind("w1"), std::invalid_argument);
}

TEST_CASE("k_range") {
    KRange r = k_range(10, TrimFraction(0.2));
    CHECK(r.lo == 2);
    CHECK(r.hi == 8);
    r = k_range(5, TrimFraction(0.2));
    CHECK(r.lo == 1);
    CHECK(r.hi == 4);
    CHECK(code_of([] { k_range(3, TrimFraction(0.49)); }) == ErrorCode::EmptyRange);
    // symmetric under k -> n-k for every n
    for (std::size_t n = 2; n < 300; ++n) {
        for (double d : {0.1, 0.2, 0.3, 0.15, 0.45}) {
            try {
                const KRange kr = k_range(n, TrimFraction(d));
                CHECK(kr.lo + kr.hi == n);
                CHECK(kr.lo >= 1);
                CHECK(kr.hi <= n - 1);
                CHECK(static_cast<double>(kr.lo) >= n * d - 1e-9);
            } catch (const Error&) {
            }
        }
    }
}

TEST_CASE("forward functional hand examples") {
    CHECK(forward_functional(series({3.3, 3.3, 3.3, 3.3}), 2, Functional::MaxAbs) == 0.0);
    const Series x = series({0.0, 1.0, 0.0});
    CHECK(forward_functional(x, 2, Functional::MaxAbs) == doctest::Approx(0.5));
    CHECK(forward_functional(x, 2, Functional::Range) == doctest::Approx(0.5));
    CHECK_THROWS_AS(forward_functional(x, 3, Functional::MaxAbs), std::out_of_range);
    CHECK_THROWS_AS(forward_functional(x, 0, Functional::MaxAbs), std::out_of_range);
}

TEST_CASE("forward functional VARTYPE matches the exact oracle") {
    // frozen from an exact rational evaluation of the double sums: 21/8
    const Series x(kTen);
    CHECK(forward_functional(x, 5, Functional::VarType) == doctest::Approx(2.625).epsilon(1e-14));
    CHECK(backward_functional(x, 5, Functional::VarType) == doctest::Approx(3.125).epsilon(1e-14));

    std::vector<oracle::Rational> exact;
    for (double v : kTen) exact.push_back(oracle::exact(v));
    CHECK(oracle::forward(exact, 5, Functional::VarType) == oracle::Rational(21, 8));
}

TEST_CASE("backward functional hand examples") {
    CHECK(backward_functional(series({5.0, 5.0, 5.0}), 1, Functional::MaxAbs) == 0.0);
    CHECK(backward_functional(series({0.0, 0.0, 1.0}), 1, Functional::MaxAbs) == doctest::Approx(0.5));
}

TEST_CASE("backward functional equals the forward functional of the reversed series") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Series x(gaussian(7 + seed, seed));
        const Series rev = x.reversed();
        const std::size_t n = x.size();
        for (Functional f : {Functional::MaxAbs, Functional::Range, Functional::VarType}) {
            for (std::size_t k = 1; k < n; ++k) {
                CHECK(backward_functional(x, k, f) ==
                      doctest::Approx(forward_functional(rev, n - k, f)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("fast profiles agree with the per-k definitions") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        std::vector<double> raw = gaussian(5 + 3 * seed, 100 + seed);
        if (seed % 3 == 0) {
            for (auto& v : raw) v += 50.0;  // offset far from zero
        }
        const Series x(raw);
        for (Functional f : {Functional::MaxAbs, Functional::Range, Functional::VarType}) {
            const auto fwd = forward_profile(x.values(), f);
            const auto bwd = backward_profile(x.values(), f);
            for (std::size_t k = 1; k < x.size(); ++k) {
                const double scale = f == Functional::VarType ? 1e-9 : 1e-10;
                CHECK(fwd[k] == doctest::Approx(forward_functional(x, k, f)).epsilon(scale));
                CHECK(bwd[k] == doctest::Approx(backward_functional(x, k, f)).epsilon(scale));
            }
        }
    }
}

TEST_CASE("functionals are nonnegative") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = gaussian(40, seed);
        for (Functional f : {Functional::MaxAbs, Functional::Range, Functional::VarType}) {
            for (double v : forward_profile(x, f)) CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("ratio_scan degenerate inputs") {
    const Series flat(std::vector<double>(10, 7.0));
    for (Functional f : {Functional::MaxAbs, Functional::Range, Functional::VarType}) {
        CHECK(code_of([&] { ratio_scan(flat, TrimFraction(0.2), f, Family::V); }) ==
              ErrorCode::AllDegenerate);
    }

    // tail is constant from index 4 on, so every k >= 3 has a zero denominator
    const Series tail = series({1, 2, 3, 1, 1, 1, 1, 1, 1, 1});
    const RatioCurve curve = ratio_scan(tail, TrimFraction(0.2), Functional::MaxAbs, Family::V);
    REQUIRE(curve.k_values.size() == 7);
    CHECK(curve.k_values.front() == 2);
    CHECK(curve.numerators[0] == doctest::Approx(0.5));
    CHECK(curve.denominators[0] == doctest::Approx(1.75));
    for (std::size_t j = 1; j < curve.k_values.size(); ++j) {
        CHECK(curve.denominators[j] == 0.0);
        CHECK(curve.ratios[j] == kInf);
    }
    CHECK(curve.sup_value == kInf);
    CHECK(curve.argmax_k == 3);

    // the Z orientation sees 0/positive there, which is a defined zero ratio
    const RatioCurve z = ratio_scan(tail, TrimFraction(0.2), Functional::MaxAbs, Family::Z);
    CHECK(z.sup_value == doctest::Approx(3.5));
    CHECK(z.argmax_k == 2);
}

TEST_CASE("ratio_scan on a fixed 20-point vector") {
    const Series x(twenty());
    struct Expected {
        Functional f;
        Family o;
        double sup;
        std::size_t argmax;
    };
    // frozen from the exact rational oracle
    const Expected cases[] = {
        {Functional::MaxAbs, Family::V, 1.7241379310344827, 12},
        {Functional::MaxAbs, Family::Z, 1.6805555555555556, 11},
        {Functional::Range, Family::V, 1.3346938775510204, 14},
        {Functional::Range, Family::Z, 1.255952380952381, 4},
        {Functional::VarType, Family::V, 3.6379806597229414, 14},
        {Functional::VarType, Family::Z, 3.9236753574432295, 4},
    };
    for (const auto& c : cases) {
        const RatioCurve curve = ratio_scan(x, TrimFraction(0.2), c.f, c.o);
        CHECK(curve.sup_value == doctest::Approx(c.sup).epsilon(1e-12));
        CHECK(curve.argmax_k == c.argmax);
        const auto exact = oracle::scan(twenty(), 4, 16, c.f, c.o == Family::Z);
        REQUIRE(exact);
        CHECK(exact->as_double() == doctest::Approx(c.sup).epsilon(1e-15));
        CHECK(exact->argmax_k == c.argmax);
    }
}

TEST_CASE("ratio curve invariants") {
    const Series x(gaussian(60, 9));
    const RatioCurve c = ratio_scan(x, TrimFraction(0.1), Functional::Range, Family::V);
    double best = -1.0;
    for (std::size_t j = 0; j < c.k_values.size(); ++j) {
        CHECK(c.numerators[j] >= 0.0);
        CHECK(c.denominators[j] >= 0.0);
        CHECK(c.ratios[j] == c.numerators[j] / c.denominators[j]);
        best = std::max(best, c.ratios[j]);
    }
    CHECK(c.sup_value == best);
    for (std::size_t j = 0; j < c.k_values.size(); ++j) {
        if (c.k_values[j] < c.argmax_k) CHECK(c.ratios[j] < c.sup_value);
        if (c.k_values[j] == c.argmax_k) CHECK(c.ratios[j] == c.sup_value);
    }
}

TEST_CASE("statistic: TMAX is the larger of V and Z and dominates every ratio") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Series x(gaussian(30 + seed, seed + 7));
        for (Functional f : {Functional::MaxAbs, Functional::Range, Functional::VarType}) {
            const double v = statistic(x, TrimFraction(0.2), {Family::V, f}).value;
            const double z = statistic(x, TrimFraction(0.2), {Family::Z, f}).value;
            const StatResult t = statistic(x, TrimFraction(0.2), {Family::TMax, f});
            CHECK(t.value == std::max(v, z));
            REQUIRE(t.second_curve);
            for (double r : t.curve.ratios) CHECK(t.value >= r);
            for (double r : t.second_curve->ratios) CHECK(t.value >= r);
        }
    }
    CHECK_THROWS_AS(statistic(Series(kTen), TrimFraction(0.2), {Family::Classical, Functional::MaxAbs}),
                    std::invalid_argument);
}

TEST_CASE("statistic: location and scale invariance") {
    const Series x(gaussian(80, 3));
    for (StatKind kind : all_stat_kinds()) {
        if (kind.family == Family::Classical) continue;
        const double base = statistic(x, TrimFraction(0.2), kind).value;
        std::vector<double> shifted, scaled;
        for (double v : x.values()) {
            shifted.push_back(v + 12.5);
            scaled.push_back(-3.0 * v);
        }
        CHECK(statistic(Series(shifted), TrimFraction(0.2), kind).value ==
              doctest::Approx(base).epsilon(1e-10));
        CHECK(statistic(Series(scaled), TrimFraction(0.2), kind).value ==
              doctest::Approx(base).epsilon(1e-10));
    }
}

TEST_CASE("bartlett_lrv") {
    const Series x(twenty());
    // bandwidth 0 is the sample variance with divisor n
    double mean = 0.0;
    for (double v : x.values()) mean += v;
    mean /= 20.0;
    double var = 0.0;
    for (double v : x.values()) var += (v - mean) * (v - mean);
    var /= 20.0;
    CHECK(bartlett_lrv(x, 0).sigma2_hat == doctest::Approx(var).epsilon(1e-14));
    // exact rational evaluation gives 25/128 at bandwidth floor(20^(1/3)) = 2
    CHECK(default_bandwidth(20) == 2);
    CHECK(bartlett_lrv(x, 2).sigma2_hat == doctest::Approx(25.0 / 128.0).epsilon(1e-14));
    CHECK_THROWS_AS(bartlett_lrv(x, 20), std::invalid_argument);

    CHECK(default_bandwidth(1000) == 10);
    CHECK(default_bandwidth(999) == 9);
    CHECK(default_bandwidth(10000) == 21);

    const Series iid(gaussian(10000, 42));
    CHECK(bartlett_lrv(iid, default_bandwidth(10000)).sigma2_hat == doctest::Approx(1.0).epsilon(0.1));

    // AR(1), rho = 0.5: long-run variance (1/(1-rho))^2 = 4
    std::mt19937_64 gen(5);
    std::normal_distribution<double> d;
    std::vector<double> ar(200000);
    double prev = d(gen) / std::sqrt(0.75);
    for (auto& v : ar) v = prev = 0.5 * prev + d(gen);
    const double s2 = bartlett_lrv(Series(ar), 60).sigma2_hat;
    CHECK(s2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("classical_statistic") {
    CHECK(code_of([] {
              const Series flat(std::vector<double>(8, 2.0));
              classical_statistic(flat, Functional::MaxAbs, bartlett_lrv(flat, 1));
          }) == ErrorCode::ZeroVariance);

    const Series two = series({0.0, 1.0});
    CHECK(classical_statistic(two, Functional::MaxAbs, {1.0, 0}) ==
          doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-15));

    // frozen from a direct exact evaluation with sigma^2 = 25/128
    const Series x(twenty());
    const LongRunVariance lrv = bartlett_lrv(x, default_bandwidth(20));
    CHECK(classical_statistic(x, Functional::MaxAbs, lrv) == doctest::Approx(0.5692099788303083).epsilon(1e-13));
    CHECK(classical_statistic(x, Functional::Range, lrv) == doctest::Approx(1.075174404457249).epsilon(1e-13));
    CHECK(classical_statistic(x, Functional::VarType, lrv) == doctest::Approx(0.10096).epsilon(1e-13));
}

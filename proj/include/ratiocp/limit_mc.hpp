#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ratiocp/cusum.hpp"
#include "ratiocp/rng.hpp"

namespace ratiocp {

inline constexpr std::size_t kDefaultGrid = 5000;

/// Wiener process sampled at t = j/m, j = 0..m; w[0] == 0.
struct WienerPath {
    std::vector<double> w;

    std::size_t m() const noexcept { return w.size() - 1; }
};

/// Cumulative N(0, 1/m) steps drawn from `rng`. Requires m >= 2.
WienerPath wiener_path(std::size_t m, Rng& rng);

/// Discretized numerator/denominator processes at t = t_index/m.
struct EtaPair {
    double t = 0.0;
    double eta_num = 0.0;
    double eta_den = 0.0;
    Functional functional = Functional::MaxAbs;
};

/// eta_num is the functional of W(s) - (s/t) W(t) over s = b/m, b = 0..t_index;
/// eta_den is the functional of W*(s) - ((1-s)/(1-t)) W*(t) over b = t_index..m with
/// W*(s) = W(1) - W(s). Integrals are left-endpoint Riemann sums with step 1/m.
/// Evaluated directly in O(m); requires 1 <= t_index <= m-1.
EtaPair eta_at(const WienerPath& path, std::size_t t_index, Functional functional);

/// One draw from the limiting law of the statistic `kind`: the sup over grid points
/// t in [delta, 1-delta] of eta_num/eta_den (V), eta_den/eta_num (Z) or their max
/// (TMax). Classical kinds return the bridge functional of the whole path and
/// ignore delta. 0/0 grid points are skipped.
double sup_ratio_draw(const WienerPath& path, TrimFraction delta, StatKind kind);

/// Sorted Monte Carlo draws of the limiting statistic.
struct NullSample {
    StatKind kind;
    double delta = 0.2;
    std::size_t m = kDefaultGrid;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<double> draws;
};

/// Replication r uses the stream derived from (seed, r), so the result does not
/// depend on `threads` (0 = hardware concurrency).
NullSample null_sample(StatKind kind, TrimFraction delta, std::size_t m, std::size_t reps,
                       std::uint64_t seed, unsigned threads = 0);

/// Order statistic at 1-based index ceil((1 - level) reps).
double critical_value(const NullSample& sample, double level);

/// (1 + #{draws >= observed}) / (reps + 1).
double p_value(const NullSample& sample, double observed);
double p_value(const std::vector<double>& sorted_draws, double observed);

/// Critical values with the provenance of the sample they came from.
struct CriticalValueTable {
    StatKind kind;
    double delta = 0.2;
    std::size_t m = kDefaultGrid;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::string rng{kRngName};
    /// level -> critical value
    std::map<double, double> quantiles;
    /// Sorted null draws backing p-values; may be empty when the table was saved without them.
    std::vector<double> draws;

    /// Throws Error(CorruptTable) unless critical values strictly decrease in level
    /// and draws, if present, are sorted, finite and nonnegative.
    void validate() const;
    double at(double level) const;
};

inline const std::vector<double> kDefaultLevels{0.10, 0.05, 0.01};

CriticalValueTable make_critical_table(const NullSample& sample,
                                       const std::vector<double>& levels = kDefaultLevels,
                                       bool keep_draws = true);

/// scale(t) F(B1)/F(B2) for independent discretized Brownian bridges B1, B2 on m+1 points,
/// where scale(t) = sqrt(t/(1-t)) for MaxAbs/Range and (t/(1-t))^2 for VarType.
double bridge_ratio_draw(double t, Functional functional, Rng& rng, std::size_t m = kDefaultGrid);

/// Bridge form of a functional on a sampled Brownian bridge b[0..m] (b[0] = b[m] = 0).
double bridge_functional(const std::vector<double>& b, Functional functional);

}  // namespace ratiocp

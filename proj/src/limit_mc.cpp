#include "ratiocp/limit_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ratiocp/error.hpp"
#include "ratiocp/parallel.hpp"

namespace ratiocp {

namespace {

struct Summary {
    double max = 0.0;
    double min = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
};

double reduce_integral(Functional functional, const Summary& s, double step, double length) {
    switch (functional) {
        case Functional::MaxAbs: return std::max(s.max, -s.min);
        case Functional::Range: return s.max - s.min;
        case Functional::VarType: {
            const double integral = step * s.sum;
            return std::max(0.0, step * s.sum_sq - integral * integral / length);
        }
    }
    return 0.0;
}

// sup over the trimmed grid of num[k]/den[k], skipping 0/0.
double grid_sup(const std::vector<double>& num, const std::vector<double>& den, KRange range) {
    double best = 0.0;
    for (std::size_t k = range.lo; k <= range.hi; ++k) {
        if (den[k] > 0.0) {
            best = std::max(best, num[k] / den[k]);
        } else if (num[k] > 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return best;
}

}  // namespace

WienerPath wiener_path(std::size_t m, Rng& rng) {
    if (m < 2) throw std::invalid_argument("Wiener grid needs m >= 2");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(1.0 / static_cast<double>(m));
    WienerPath path;
    path.w.resize(m + 1);
    path.w[0] = 0.0;
    for (std::size_t j = 1; j <= m; ++j) path.w[j] = path.w[j - 1] + scale * normal(rng);
    return path;
}

EtaPair eta_at(const WienerPath& path, std::size_t t_index, Functional functional) {
    const std::size_t m = path.m();
    if (t_index < 1 || t_index >= m) throw std::out_of_range("t_index must lie in [1, m-1]");
    const auto& w = path.w;
    const double mm = static_cast<double>(m);
    const double step = 1.0 / mm;
    const double t = static_cast<double>(t_index) / mm;
    const std::size_t k = t_index;

    Summary left;
    const double wt = w[k];
    for (std::size_t b = 0; b <= k; ++b) {
        const double v = w[b] - (static_cast<double>(b) / static_cast<double>(k)) * wt;
        left.max = std::max(left.max, v);
        left.min = std::min(left.min, v);
        if (b < k) {
            left.sum += v;
            left.sum_sq += v * v;
        }
    }

    Summary right;
    const double w1 = w[m];
    const double star_t = w1 - wt;
    for (std::size_t b = k; b <= m; ++b) {
        const double star = w1 - w[b];
        const double v =
            star - (static_cast<double>(m - b) / static_cast<double>(m - k)) * star_t;
        right.max = std::max(right.max, v);
        right.min = std::min(right.min, v);
        if (b < m) {
            right.sum += v;
            right.sum_sq += v * v;
        }
    }

    return EtaPair{t, reduce_integral(functional, left, step, t),
                   reduce_integral(functional, right, step, 1.0 - t), functional};
}

double sup_ratio_draw(const WienerPath& path, TrimFraction delta, StatKind kind) {
    const std::size_t m = path.m();
    std::vector<double> steps(m);
    for (std::size_t j = 0; j < m; ++j) steps[j] = path.w[j + 1] - path.w[j];

    if (kind.family == Family::Classical) {
        // increments have variance exactly 1/m, so n sigma^2 = 1
        return classical_statistic(Series(std::move(steps)), kind.functional,
                                   LongRunVariance{1.0 / static_cast<double>(m), 0});
    }

    // On the grid t = k/m, eta_num and eta_den are the forward and backward CUSUM
    // functionals of the increments, up to a common factor that cancels in the ratio.
    const KRange range = k_range(m, delta);
    const auto fwd = forward_profile(steps, kind.functional);
    const auto bwd = backward_profile(steps, kind.functional);
    switch (kind.family) {
        case Family::V: return grid_sup(fwd, bwd, range);
        case Family::Z: return grid_sup(bwd, fwd, range);
        case Family::TMax: return std::max(grid_sup(fwd, bwd, range), grid_sup(bwd, fwd, range));
        case Family::Classical: break;
    }
    return 0.0;
}

NullSample null_sample(StatKind kind, TrimFraction delta, std::size_t m, std::size_t reps,
                       std::uint64_t seed, unsigned threads) {
    if (reps == 0) throw std::invalid_argument("null sample needs reps >= 1");
    if (kind.family != Family::Classical) k_range(m, delta);
    NullSample sample{kind, delta.value(), m, reps, seed, std::vector<double>(reps)};
    parallel_for(reps, threads, [&](std::size_t r) {
        Rng rng = make_stream(seed, {r});
        const WienerPath path = wiener_path(m, rng);
        sample.draws[r] = sup_ratio_draw(path, delta, kind);
    });
    std::sort(sample.draws.begin(), sample.draws.end());
    return sample;
}

double critical_value(const NullSample& sample, double level) {
    if (sample.draws.empty()) throw std::invalid_argument("empty null sample");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
    const double reps = static_cast<double>(sample.draws.size());
    double pos = (1.0 - level) * reps;
    // (1 - 0.1) * 10 must give index 9, not 10
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) <= 1e-9 * std::max(1.0, pos)) pos = nearest;
    const auto index = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(pos)), 1,
                                               sample.draws.size());
    return sample.draws[index - 1];
}

double p_value(const std::vector<double>& sorted_draws, double observed) {
    if (sorted_draws.empty()) throw std::invalid_argument("empty null sample");
    if (std::isnan(observed)) throw std::invalid_argument("observed statistic is NaN");
    const auto first = std::lower_bound(sorted_draws.begin(), sorted_draws.end(), observed);
    const auto at_least = static_cast<double>(sorted_draws.end() - first);
    return (1.0 + at_least) / (static_cast<double>(sorted_draws.size()) + 1.0);
}

double p_value(const NullSample& sample, double observed) {
    return p_value(sample.draws, observed);
}

void CriticalValueTable::validate() const {
    if (quantiles.empty()) throw Error(ErrorCode::CorruptTable, "no critical values");
    if (reps == 0 || m < 2) throw Error(ErrorCode::CorruptTable, "invalid provenance (reps, m)");
    if (kind.family != Family::Classical && !(delta > 0.0 && delta < 0.5)) {
        throw Error(ErrorCode::CorruptTable, "delta outside (0, 0.5)");
    }
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& [level, value] : quantiles) {
        if (!(level > 0.0 && level < 1.0) || !std::isfinite(value)) {
            throw Error(ErrorCode::CorruptTable, "invalid level or critical value");
        }
        // ascending levels need strictly descending critical values
        if (!(value < previous)) {
            throw Error(ErrorCode::CorruptTable, "critical values not decreasing in level");
        }
        previous = value;
    }
    if (!draws.empty()) {
        if (draws.size() != reps) throw Error(ErrorCode::CorruptTable, "draw count differs from reps");
        for (std::size_t i = 0; i < draws.size(); ++i) {
            if (!std::isfinite(draws[i]) || draws[i] < 0.0 || (i > 0 && draws[i] < draws[i - 1])) {
                throw Error(ErrorCode::CorruptTable, "draws must be sorted, finite and nonnegative");
            }
        }
    }
}

double CriticalValueTable::at(double level) const {
    const auto it = quantiles.find(level);
    if (it == quantiles.end()) {
        throw std::out_of_range("no critical value for level " + std::to_string(level));
    }
    return it->second;
}

CriticalValueTable make_critical_table(const NullSample& sample, const std::vector<double>& levels,
                                       bool keep_draws) {
    CriticalValueTable table;
    table.kind = sample.kind;
    table.delta = sample.delta;
    table.m = sample.m;
    table.reps = sample.reps;
    table.seed = sample.seed;
    for (double level : levels) table.quantiles[level] = critical_value(sample, level);
    if (keep_draws) table.draws = sample.draws;
    table.validate();
    return table;
}

double bridge_functional(const std::vector<double>& b, Functional functional) {
    const std::size_t m = b.size() - 1;
    Summary s;
    for (std::size_t j = 0; j <= m; ++j) {
        s.max = std::max(s.max, b[j]);
        s.min = std::min(s.min, b[j]);
        if (j < m) {
            s.sum += b[j];
            s.sum_sq += b[j] * b[j];
        }
    }
    return reduce_integral(functional, s, 1.0 / static_cast<double>(m), 1.0);
}

double bridge_ratio_draw(double t, Functional functional, Rng& rng, std::size_t m) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("t must lie in (0, 1)");
    auto bridge = [&] {
        WienerPath path = wiener_path(m, rng);
        const double w1 = path.w[m];
        for (std::size_t j = 0; j <= m; ++j) {
            path.w[j] -= (static_cast<double>(j) / static_cast<double>(m)) * w1;
        }
        return bridge_functional(path.w, functional);
    };
    const double f1 = bridge();
    const double f2 = bridge();
    const double odds = t / (1.0 - t);
    const double scale = functional == Functional::VarType ? odds * odds : std::sqrt(odds);
    return scale * f1 / f2;
}

}  // namespace ratiocp

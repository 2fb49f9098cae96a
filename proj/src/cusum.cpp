#include "ratiocp/cusum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ratiocp/error.hpp"

namespace ratiocp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Adds x[i] + x[n-1-i] pairwise from both ends. Floating-point addition is
// commutative, so a series and its reversal get the same mean bit for bit.
double reversal_symmetric_mean(std::span<const double> x) {
    const std::size_t n = x.size();
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n / 2; ++i) {
        sum += static_cast<long double>(x[i]) + static_cast<long double>(x[n - 1 - i]);
    }
    if (n % 2 == 1) sum += x[n / 2];
    return static_cast<double>(sum / static_cast<long double>(n));
}

// Largest L such that x[0..L) are all equal. A constant segment has identically
// zero centered sums, which rounding in the centering step would otherwise blur.
std::size_t constant_prefix(std::span<const double> x) {
    std::size_t len = x.empty() ? 0 : 1;
    while (len < x.size() && x[len] == x[0]) ++len;
    return len;
}

void check_k(std::size_t n, std::size_t k) {
    if (k < 1 || k >= n) {
        throw std::out_of_range("candidate change point k must satisfy 1 <= k <= n-1");
    }
}

double reduce(Functional functional, double max_s, double min_s, double sum_sq, double sum,
              std::size_t len) {
    switch (functional) {
        case Functional::MaxAbs: return std::max(max_s, -min_s);
        case Functional::Range: return max_s - min_s;
        case Functional::VarType:
            return std::max(0.0, sum_sq - sum * sum / static_cast<double>(len));
    }
    return 0.0;
}

// Upper/lower convex hulls of the points (i, p[i]) added in increasing i.
// max_i (p[i] - a i) is attained on the upper hull, where it is unimodal in the hull index.
class MonotoneHull {
public:
    explicit MonotoneHull(std::span<const double> p) : p_(p) {}

    void add(std::size_t i) {
        while (upper_.size() >= 2 && cross(upper_[upper_.size() - 2], upper_.back(), i) >= 0.0) {
            upper_.pop_back();
        }
        upper_.push_back(i);
        while (lower_.size() >= 2 && cross(lower_[lower_.size() - 2], lower_.back(), i) <= 0.0) {
            lower_.pop_back();
        }
        lower_.push_back(i);
    }

    double max_minus_slope(double a) const {
        std::size_t lo = 0, hi = upper_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (value(upper_[mid], a) < value(upper_[mid + 1], a)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        return value(upper_[lo], a);
    }

    double min_minus_slope(double a) const {
        std::size_t lo = 0, hi = lower_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (value(lower_[mid], a) > value(lower_[mid + 1], a)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        return value(lower_[lo], a);
    }

private:
    double value(std::size_t i, double a) const { return p_[i] - a * static_cast<double>(i); }

    double cross(std::size_t o, std::size_t a, std::size_t b) const {
        const double ax = static_cast<double>(a - o), ay = p_[a] - p_[o];
        const double bx = static_cast<double>(b - o), by = p_[b] - p_[o];
        return ax * by - ay * bx;
    }

    std::span<const double> p_;
    std::vector<std::size_t> upper_;
    std::vector<std::size_t> lower_;
};

RatioCurve build_curve(const std::vector<double>& num, const std::vector<double>& den, KRange range) {
    RatioCurve curve;
    const std::size_t len = range.size();
    curve.k_values.reserve(len);
    curve.numerators.reserve(len);
    curve.denominators.reserve(len);
    curve.ratios.reserve(len);
    bool any_defined = false;
    for (std::size_t k = range.lo; k <= range.hi; ++k) {
        const double a = num[k], b = den[k];
        double r;
        if (b > 0.0) {
            r = a / b;
        } else if (a > 0.0) {
            r = kInf;
        } else {
            r = kNaN;
        }
        curve.k_values.push_back(k);
        curve.numerators.push_back(a);
        curve.denominators.push_back(b);
        curve.ratios.push_back(r);
        if (r == r && (!any_defined || r > curve.sup_value)) {
            curve.sup_value = r;
            curve.argmax_k = k;
            any_defined = true;
        }
    }
    if (!any_defined) {
        throw Error(ErrorCode::AllDegenerate, "every candidate change point gives 0/0");
    }
    return curve;
}

}  // namespace

Series::Series(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw Error(ErrorCode::TooShort, "a series needs at least two observations");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorCode::InvalidSeries,
                        "observation " + std::to_string(i + 1) + " is not finite");
        }
    }
}

Series Series::reversed() const {
    return Series(std::vector<double>(values_.rbegin(), values_.rend()));
}

TrimFraction::TrimFraction(double delta) : delta_(delta) {
    if (!(delta > 0.0 && delta < 0.5)) {
        throw std::invalid_argument("trimming fraction must lie in (0, 0.5)");
    }
}

std::string_view to_string(Functional functional) noexcept {
    switch (functional) {
        case Functional::MaxAbs: return "maxabs";
        case Functional::Range: return "range";
        case Functional::VarType: return "vartype";
    }
    return "";
}

std::string to_string(StatKind kind) {
    std::string name;
    switch (kind.family) {
        case Family::V: name = "v"; break;
        case Family::Z: name = "z"; break;
        case Family::TMax: name = "tmax"; break;
        case Family::Classical: name = "t"; break;
    }
    switch (kind.functional) {
        case Functional::MaxAbs: return name + "1";
        case Functional::Range: return name + "2";
        case Functional::VarType: return name + "3";
    }
    return name;
}

StatKind parse_stat_kind(std::string_view name) {
    for (StatKind kind : all_stat_kinds()) {
        if (to_string(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown statistic '" + std::string(name) + "'");
}

std::array<StatKind, 12> all_stat_kinds() noexcept {
    std::array<StatKind, 12> kinds{};
    std::size_t i = 0;
    for (Family family : {Family::V, Family::Z, Family::TMax, Family::Classical}) {
        for (Functional f : {Functional::MaxAbs, Functional::Range, Functional::VarType}) {
            kinds[i++] = StatKind{family, f};
        }
    }
    return kinds;
}

KRange k_range(std::size_t n, TrimFraction delta) {
    if (n < 2) throw Error(ErrorCode::EmptyRange, "n must be at least 2");
    // n*delta that is an integer up to rounding error is treated as that integer
    const double edge = static_cast<double>(n) * delta.value();
    const double nearest = std::round(edge);
    const double lo_real =
        std::abs(edge - nearest) <= 1e-9 * std::max(1.0, edge) ? nearest : std::ceil(edge);
    // floor(n - n*delta) == n - ceil(n*delta), which keeps the range symmetric under k -> n-k
    std::size_t lo = std::max<std::size_t>(1, static_cast<std::size_t>(lo_real));
    KRange range{lo, n >= lo ? n - lo : 0};
    if (range.hi > n - 1) range.hi = n - 1;
    if (range.lo > range.hi) {
        throw Error(ErrorCode::EmptyRange, "no candidate change point for n=" + std::to_string(n) +
                                               " and delta=" + std::to_string(delta.value()));
    }
    return range;
}

double forward_functional(const Series& x, std::size_t k, Functional functional) {
    const std::size_t n = x.size();
    check_k(n, k);
    const auto seg = x.values().first(k);
    if (constant_prefix(seg) == k) return 0.0;
    double mean = 0.0;
    for (double v : seg) mean += v;
    mean /= static_cast<double>(k);
    double s = 0.0, max_s = 0.0, min_s = 0.0, sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        s += seg[i] - mean;
        max_s = std::max(max_s, s);
        min_s = std::min(min_s, s);
        sum += s;
        sum_sq += s * s;
    }
    return reduce(functional, max_s, min_s, sum_sq, sum, k);
}

double backward_functional(const Series& x, std::size_t k, Functional functional) {
    const std::size_t n = x.size();
    check_k(n, k);
    const auto seg = x.values().subspan(k);
    const std::size_t len = seg.size();
    if (constant_prefix(seg) == len) return 0.0;
    double mean = 0.0;
    for (double v : seg) mean += v;
    mean /= static_cast<double>(len);
    double r = 0.0, max_r = 0.0, min_r = 0.0, sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = len; i-- > 0;) {
        r += seg[i] - mean;
        max_r = std::max(max_r, r);
        min_r = std::min(min_r, r);
        sum += r;
        sum_sq += r * r;
    }
    return reduce(functional, max_r, min_r, sum_sq, sum, len);
}

std::vector<double> forward_profile(std::span<const double> x, Functional functional) {
    const std::size_t n = x.size();
    std::vector<double> out(n + 1, 0.0);
    if (n == 0) return out;
    const double mean = reversal_symmetric_mean(x);
    // Partial sums of the globally centered series; the per-k centering is the
    // linear correction p[i] - (i/k) p[k], which does not depend on the constant removed here.
    std::vector<double> p(n + 1, 0.0);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<long double>(x[i]) - mean;
        p[i + 1] = static_cast<double>(acc);
    }
    const std::size_t flat = constant_prefix(x);

    if (functional == Functional::VarType) {
        long double s0 = 0.0L, s1 = 0.0L, s2 = 0.0L;
        for (std::size_t k = 1; k <= n; ++k) {
            const long double pk = p[k];
            const long double kk = static_cast<long double>(k);
            s0 += pk;
            s1 += kk * pk;
            s2 += pk * pk;
            if (k <= flat) continue;
            const long double a = pk / kk;
            const long double sum_i = kk * (kk + 1.0L) / 2.0L;
            const long double sum_i2 = kk * (kk + 1.0L) * (2.0L * kk + 1.0L) / 6.0L;
            const long double sq = s2 - 2.0L * a * s1 + a * a * sum_i2;
            const long double lin = s0 - a * sum_i;
            out[k] = std::max(0.0, static_cast<double>(sq - lin * lin / kk));
        }
        return out;
    }

    MonotoneHull hull(p);
    hull.add(0);
    for (std::size_t k = 1; k <= n; ++k) {
        hull.add(k);
        if (k <= flat) continue;
        const double a = p[k] / static_cast<double>(k);
        const double hi = std::max(0.0, hull.max_minus_slope(a));
        const double lo = std::min(0.0, hull.min_minus_slope(a));
        out[k] = functional == Functional::MaxAbs ? std::max(hi, -lo) : hi - lo;
    }
    return out;
}

std::vector<double> backward_profile(std::span<const double> x, Functional functional) {
    const std::vector<double> rev(x.rbegin(), x.rend());
    const std::vector<double> fwd = forward_profile(rev, functional);
    const std::size_t n = x.size();
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) out[k] = fwd[n - k];
    return out;
}

RatioCurve ratio_scan(const Series& x, TrimFraction delta, Functional functional,
                      Family orientation) {
    if (orientation != Family::V && orientation != Family::Z) {
        throw std::invalid_argument("ratio_scan orientation must be V or Z");
    }
    const KRange range = k_range(x.size(), delta);
    const auto fwd = forward_profile(x.values(), functional);
    const auto bwd = backward_profile(x.values(), functional);
    return orientation == Family::V ? build_curve(fwd, bwd, range) : build_curve(bwd, fwd, range);
}

StatResult statistic(const Series& x, TrimFraction delta, StatKind kind) {
    const KRange range = k_range(x.size(), delta);
    const auto fwd = forward_profile(x.values(), kind.functional);
    const auto bwd = backward_profile(x.values(), kind.functional);
    StatResult result;
    switch (kind.family) {
        case Family::V:
            result.curve = build_curve(fwd, bwd, range);
            break;
        case Family::Z:
            result.curve = build_curve(bwd, fwd, range);
            break;
        case Family::TMax: {
            result.curve = build_curve(fwd, bwd, range);
            result.second_curve = build_curve(bwd, fwd, range);
            const RatioCurve& z = *result.second_curve;
            const bool v_wins = result.curve.sup_value >= z.sup_value;
            result.value = v_wins ? result.curve.sup_value : z.sup_value;
            result.argmax_k = v_wins ? result.curve.argmax_k : z.argmax_k;
            return result;
        }
        case Family::Classical:
            throw std::invalid_argument("classical statistics need a long-run variance estimate");
    }
    result.value = result.curve.sup_value;
    result.argmax_k = result.curve.argmax_k;
    return result;
}

std::size_t default_bandwidth(std::size_t n) noexcept {
    auto b = static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
    while ((b + 1) * (b + 1) * (b + 1) <= n) ++b;
    while (b > 0 && b * b * b > n) --b;
    return b;
}

LongRunVariance bartlett_lrv(const Series& x, std::size_t bandwidth) {
    const std::size_t n = x.size();
    if (bandwidth >= n) throw std::invalid_argument("Bartlett bandwidth must be smaller than n");
    long double mean = 0.0L;
    for (double v : x.values()) mean += v;
    mean /= static_cast<long double>(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(x[i] - mean);

    auto autocov = [&](std::size_t h) {
        long double acc = 0.0L;
        for (std::size_t i = h; i < n; ++i) acc += static_cast<long double>(y[i]) * y[i - h];
        return acc / static_cast<long double>(n);
    };
    long double s2 = autocov(0);
    for (std::size_t h = 1; h <= bandwidth; ++h) {
        const long double w = 1.0L - static_cast<long double>(h) / (bandwidth + 1.0L);
        s2 += 2.0L * w * autocov(h);
    }
    return LongRunVariance{std::max(0.0, static_cast<double>(s2)), bandwidth};
}

double classical_statistic(const Series& x, Functional functional, const LongRunVariance& lrv) {
    if (!(lrv.sigma2_hat > 0.0)) {
        throw Error(ErrorCode::ZeroVariance, "long-run variance estimate is zero");
    }
    const std::size_t n = x.size();
    long double mean = 0.0L;
    for (double v : x.values()) mean += v;
    mean /= static_cast<long double>(n);
    long double s = 0.0L, max_s = 0.0L, min_s = 0.0L, sum = 0.0L, sum_sq = 0.0L;
    for (double v : x.values()) {
        s += v - mean;
        max_s = std::max(max_s, s);
        min_s = std::min(min_s, s);
        sum += s;
        sum_sq += s * s;
    }
    const double nn = static_cast<double>(n);
    switch (functional) {
        case Functional::MaxAbs:
            return static_cast<double>(std::max(max_s, -min_s)) / std::sqrt(nn * lrv.sigma2_hat);
        case Functional::Range:
            return static_cast<double>(max_s - min_s) / std::sqrt(nn * lrv.sigma2_hat);
        case Functional::VarType: {
            const double body = std::max(0.0, static_cast<double>(sum_sq - sum * sum / n));
            return body / (nn * nn * lrv.sigma2_hat);
        }
    }
    return 0.0;
}

}  // namespace ratiocp

#include "ratiocp/datagen.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ratiocp/error.hpp"
#include "ratiocp/rng.hpp"

namespace ratiocp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& message) {
    if (!ok) throw Error(ErrorCode::InvalidSpec, message);
}

class Innovations {
public:
    explicit Innovations(const InnovationSpec& spec) : rng_(make_stream(spec.seed)) {}

    double next() { return normal_(rng_); }

    std::vector<double> take(std::size_t count) {
        std::vector<double> out(count);
        for (double& v : out) v = next();
        return out;
    }

private:
    Rng rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace

void validate(const GeneratorSpec& spec) {
    std::visit(Overloaded{
                   [](const IidModel&) {},
                   [](const LinearModel& m) {
                       require(!m.coeffs.empty(), "linear filter needs at least one coefficient");
                       double sum = 0.0;
                       for (double c : m.coeffs) {
                           require(std::isfinite(c), "linear coefficients must be finite");
                           sum += c;
                       }
                       require(sum != 0.0, "linear coefficients must not sum to zero");
                   },
                   [](const Ar1Model& m) {
                       require(std::isfinite(m.rho) && std::abs(m.rho) < 1.0,
                               "AR(1) requires |rho| < 1");
                   },
                   [](const Garch11Model& m) {
                       require(std::isfinite(m.omega) && m.omega > 0.0, "GARCH requires omega > 0");
                       require(m.alpha >= 0.0 && m.beta >= 0.0,
                               "GARCH requires alpha >= 0 and beta >= 0");
                       // E delta^2 = 1 for standard normal innovations
                       require(m.alpha + m.beta < 1.0, "GARCH requires alpha E delta^2 + beta < 1");
                   },
               },
               spec.model);
}

Series gen_errors(std::size_t n, const GeneratorSpec& spec) {
    validate(spec);
    if (n < 2) throw Error(ErrorCode::InvalidSpec, "need n >= 2");
    Innovations source(spec.innovations);
    std::vector<double> delta = source.take(n);

    std::visit(Overloaded{
                   [](const IidModel&) {},
                   [&](const LinearModel& m) {
                       const std::size_t lags = m.coeffs.size() - 1;
                       // pre[j] holds delta_{-j}, i.e. delta_0, delta_{-1}, ...
                       const std::vector<double> pre = source.take(lags);
                       std::vector<double> eps(n, 0.0);
                       for (std::size_t k = 0; k < n; ++k) {
                           double acc = 0.0;
                           for (std::size_t i = 0; i <= lags; ++i) {
                               const double d = i <= k ? delta[k - i] : pre[i - k - 1];
                               acc += m.coeffs[i] * d;
                           }
                           eps[k] = acc;
                       }
                       delta = std::move(eps);
                   },
                   [&](const Ar1Model& m) {
                       double prev = source.next() / std::sqrt(1.0 - m.rho * m.rho);
                       for (double& v : delta) {
                           v = m.rho * prev + v;
                           prev = v;
                       }
                   },
                   [&](const Garch11Model& m) {
                       double tau2 = m.omega / (1.0 - m.alpha - m.beta);
                       double eps = source.next() * std::sqrt(tau2);
                       for (std::size_t b = 0; b < kGarchBurnIn; ++b) {
                           tau2 = m.omega + m.alpha * eps * eps + m.beta * tau2;
                           eps = source.next() * std::sqrt(tau2);
                       }
                       for (double& v : delta) {
                           tau2 = m.omega + m.alpha * eps * eps + m.beta * tau2;
                           eps = v * std::sqrt(tau2);
                           v = eps;
                       }
                   },
               },
               spec.model);
    return Series(std::move(delta));
}

std::size_t change_point(std::size_t n, const ChangeSpec& change) {
    require(change.theta > 0.0 && change.theta < 1.0, "theta must lie in (0, 1)");
    const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * change.theta));
    require(k >= 1 && k < n, "change point floor(n theta) must satisfy 1 <= k* < n");
    return k;
}

Series apply_change(const Series& errors, const ChangeSpec& change) {
    require(std::isfinite(change.mu) && std::isfinite(change.delta_mag),
            "mu and delta_mag must be finite");
    const std::size_t n = errors.size();
    std::vector<double> x(n);
    if (change.regime == Regime::None) {
        for (std::size_t i = 0; i < n; ++i) x[i] = change.mu + errors[i];
        return Series(std::move(x));
    }
    const std::size_t ks = change_point(n, change);
    // 1-based k maps to index k-1 throughout
    switch (change.regime) {
        case Regime::None: break;
        case Regime::MeanShift:
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = change.mu + errors[i] + (i + 1 > ks ? change.delta_mag : 0.0);
            }
            break;
        case Regime::StatToRw: {
            for (std::size_t i = 0; i < ks; ++i) x[i] = change.mu + errors[i];
            double walk = errors[ks - 1];
            for (std::size_t i = ks; i < n; ++i) {
                walk += errors[i];
                x[i] = change.mu + walk;
            }
            break;
        }
        case Regime::RwToStat: {
            double walk = 0.0;
            for (std::size_t i = ks; i-- > 0;) {
                walk += errors[i];
                x[i] = change.mu + walk;
            }
            for (std::size_t i = ks; i < n; ++i) x[i] = change.mu + errors[i];
            break;
        }
    }
    return Series(std::move(x));
}

Series generate(std::size_t n, const GeneratorSpec& spec, const ChangeSpec& change) {
    return apply_change(gen_errors(n, spec), change);
}

}  // namespace ratiocp

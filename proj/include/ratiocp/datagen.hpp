#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "ratiocp/cusum.hpp"

namespace ratiocp {

enum class Distribution { StandardNormal };

struct InnovationSpec {
    Distribution distribution = Distribution::StandardNormal;
    std::uint64_t seed = 0;
};

struct IidModel {};

/// eps_k = sum_i coeffs[i] * delta_{k-i}, truncated at coeffs.size() terms.
struct LinearModel {
    std::vector<double> coeffs;
};

struct Ar1Model {
    double rho = 0.0;
};

/// eps_k = delta_k tau_k, tau_k^2 = omega + alpha eps_{k-1}^2 + beta tau_{k-1}^2.
struct Garch11Model {
    double omega = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
};

using ErrorModel = std::variant<IidModel, LinearModel, Ar1Model, Garch11Model>;

struct GeneratorSpec {
    ErrorModel model;
    InnovationSpec innovations;
};

/// Discarded GARCH steps before the first returned observation.
inline constexpr std::size_t kGarchBurnIn = 500;

/// Throws Error(InvalidSpec) for |rho| >= 1, alpha + beta >= 1 (standard normal
/// innovations), omega <= 0, negative GARCH coefficients, an empty linear filter,
/// non-finite coefficients or coefficients summing to zero.
void validate(const GeneratorSpec& spec);

/// Error sequence eps_1..eps_n. The first n standard normal draws of the stream
/// are the innovations delta_1..delta_n; start-up draws (AR(1) stationary start,
/// GARCH burn-in, linear pre-sample) come after them.
Series gen_errors(std::size_t n, const GeneratorSpec& spec);

enum class Regime {
    None,       ///< X_k = mu + eps_k
    MeanShift,  ///< mean rises by delta_mag after k*
    StatToRw,   ///< stationary up to k*, random walk afterwards
    RwToStat,   ///< random walk up to k*, stationary afterwards
};

struct ChangeSpec {
    Regime regime = Regime::None;
    double theta = 0.5;
    double delta_mag = 0.0;
    double mu = 0.0;
};

/// k* = floor(n theta); throws Error(InvalidSpec) unless 1 <= k* < n.
std::size_t change_point(std::size_t n, const ChangeSpec& change);

/// Builds X_1..X_n from an error sequence:
///  - MeanShift: X_k = mu + eps_k + delta_mag 1{k > k*}
///  - StatToRw:  X_k = mu + eps_k for k <= k*, mu + eps_{k*} + ... + eps_k for k > k*
///  - RwToStat:  X_k = mu + eps_k + ... + eps_{k*} for k <= k*, mu + eps_k for k > k*
Series apply_change(const Series& errors, const ChangeSpec& change);

/// gen_errors followed by apply_change.
Series generate(std::size_t n, const GeneratorSpec& spec, const ChangeSpec& change);

}  // namespace ratiocp

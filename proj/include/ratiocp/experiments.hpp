#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ratiocp/cusum.hpp"
#include "ratiocp/datagen.hpp"
#include "ratiocp/limit_mc.hpp"

namespace ratiocp {

/// Value of any of the twelve statistics; classical kinds use the Bartlett
/// estimator with the default bandwidth.
double statistic_value(const Series& x, TrimFraction delta, StatKind kind);

struct ExperimentConfig {
    std::size_t n = 500;
    std::size_t reps = 2000;
    std::vector<double> levels = kDefaultLevels;
    GeneratorSpec generator;
    ChangeSpec change;
    StatKind kind;
    TrimFraction delta{0.2};
    CriticalValueTable critical_values;
    std::uint64_t master_seed = 0;
    /// Selects the sub-stream family; replication r of cell c draws from (master_seed, c, r).
    std::uint64_t cell_index = 0;
};

/// Throws std::invalid_argument when the table does not match (kind, delta) or lacks a level.
void validate(const ExperimentConfig& cfg);

/// Stable hex digest of every field that influences the result.
std::string config_digest(const ExperimentConfig& cfg);

struct LevelRate {
    double level = 0.0;
    double rate = 0.0;
    double std_error = 0.0;
};

struct RejectionReport {
    std::vector<LevelRate> rates;
    std::size_t reps = 0;
    /// replications whose statistic was +infinity; they count as rejections
    std::size_t infinite = 0;
    std::string digest;

    double rate_at(double level) const;
    double se_at(double level) const;
};

/// Rejects when the statistic is >= the level's critical value.
RejectionReport run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

enum class TableId { T1 = 1, T2, T3, T4, T5, T6, T7, T8, T9 };

std::string to_string(TableId id);
/// Accepts "T1".."T9" (case-insensitive) or "1".."9"; throws std::invalid_argument.
TableId parse_table_id(std::string_view name);

/// The published tables use these levels in this order.
inline constexpr std::array<double, 3> kTableLevels{0.10, 0.05, 0.01};

/// One (n, column) entry of a published table; the three levels share a run.
struct TableCellSpec {
    TableId table = TableId::T1;
    std::size_t n = 0;
    GeneratorSpec generator;
    ChangeSpec change;
    std::string column;  ///< "rho=0.3" or "delta=1"
    std::array<double, 3> printed{};    ///< printed values by kTableLevels
    std::array<bool, 3> anomalous{};    ///< printed value looks like a typo; compare but don't gate
};

/// Exact grid of a table, in printed order (rows n, then columns).
std::vector<TableCellSpec> table_layout(TableId id);

struct TableCellResult {
    TableCellSpec spec;
    RejectionReport report;
};

/// Runs every cell of table `id` with kind V1 and delta 0.2. `critical_values` must
/// be a V1, delta = 0.2 table containing the levels 0.10, 0.05 and 0.01.
std::vector<TableCellResult> reproduce_table(TableId id, const CriticalValueTable& critical_values,
                                             std::size_t reps, std::uint64_t seed,
                                             unsigned threads = 0);

/// Median of the statistic over `reps` iid-error replications of the alternative
/// `regime` (theta = 0.5, and delta_mag = 1 for MeanShift) at each sample size.
std::vector<double> divergence_trend(StatKind kind, Regime regime,
                                     const std::vector<std::size_t>& n_grid, std::size_t reps,
                                     std::uint64_t seed, TrimFraction delta = TrimFraction{0.2},
                                     unsigned threads = 0);

}  // namespace ratiocp

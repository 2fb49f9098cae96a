#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratiocp/cusum.hpp"
#include "ratiocp/experiments.hpp"
#include "ratiocp/limit_mc.hpp"

namespace ratiocp {

inline constexpr std::string_view kTableFormatVersion = "1";

/// One value per line; blank lines and lines starting with '#' are skipped, and a
/// single non-numeric first data line is taken as a header.
/// Throws Error(ParseError) with the 1-based line number, Error(TooShort) for n < 2.
Series parse_series(std::istream& in);
Series load_series(const std::filesystem::path& path);

/// One value per line with 17 significant digits, after `#` comment lines.
void write_series(std::ostream& out, const Series& x, const std::vector<std::string>& comments = {});

nlohmann::json to_json(const CriticalValueTable& table);
/// Throws Error(VersionMismatch) or Error(CorruptTable).
CriticalValueTable critical_table_from_json(const nlohmann::json& doc);

void save_critical_table(const CriticalValueTable& table, const std::filesystem::path& path);
CriticalValueTable load_critical_table(const std::filesystem::path& path);

/// Outcome of testing one series against a critical-value table.
struct DetectionReport {
    StatKind kind;
    double value = 0.0;  ///< may be +infinity
    std::size_t argmax_k = 0;
    std::size_t n = 0;
    double delta = 0.0;
    std::map<double, double> critical_values;
    /// empty when the table carries no null draws
    std::optional<double> p_value;
    std::map<double, bool> reject;
    std::optional<std::size_t> bandwidth;  ///< classical kinds only
    double sigma2_hat = 0.0;               ///< classical kinds only
    std::string table_digest;
    std::uint64_t table_seed = 0;
};

/// For classical kinds `bandwidth` defaults to floor(n^(1/3)) and argmax_k is the
/// position of the largest absolute CUSUM. Throws std::invalid_argument when the
/// table was simulated for another kind or delta.
DetectionReport detect(const Series& x, StatKind kind, TrimFraction delta,
                       const CriticalValueTable& table,
                       std::optional<std::size_t> bandwidth = std::nullopt);

/// Digest of a table's provenance and critical values.
std::string table_digest(const CriticalValueTable& table);

/// A real as a JSON value: numbers for finite values, "inf"/"-inf" otherwise.
nlohmann::json real_to_json(double v);

nlohmann::json to_json(const DetectionReport& report);
nlohmann::json to_json(const RejectionReport& report);
nlohmann::json to_json(const std::vector<TableCellResult>& cells);

/// Header plus one row per (cell, level).
std::string table_csv(const std::vector<TableCellResult>& cells);
/// Header plus one row per level.
std::string report_csv(const RejectionReport& report);

}  // namespace ratiocp

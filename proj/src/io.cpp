#include "ratiocp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "ratiocp/error.hpp"

namespace ratiocp {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string format_real(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <class T>
T field(const json& doc, const char* name) {
    if (!doc.contains(name)) {
        throw Error(ErrorCode::CorruptTable, std::string("missing field '") + name + "'");
    }
    try {
        return doc.at(name).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::CorruptTable, std::string("field '") + name + "' has the wrong type");
    }
}

}  // namespace

Series parse_series(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto v = parse_real(text);
        if (!v) {
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": not a number: '" + std::string(text) + "'");
        }
        if (!std::isfinite(*v)) {
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": value is not finite");
        }
        header_allowed = false;
        values.push_back(*v);
    }
    if (values.size() < 2) {
        throw Error(ErrorCode::TooShort,
                    "need at least two observations, got " + std::to_string(values.size()));
    }
    return Series(std::move(values));
}

Series load_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return parse_series(in);
}

void write_series(std::ostream& out, const Series& x, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
    for (double v : x.values()) out << format_real(v, 17) << '\n';
}

json real_to_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? "inf" : "-inf";
}

json to_json(const CriticalValueTable& table) {
    json quantiles = json::array();
    for (const auto& [level, value] : table.quantiles) {
        quantiles.push_back({{"level", level}, {"value", value}});
    }
    return json{
        {"format", "ratiocp-critical-values"},
        {"version", kTableFormatVersion},
        {"kind", to_string(table.kind)},
        {"delta", table.delta},
        {"m", table.m},
        {"reps", table.reps},
        {"seed", table.seed},
        {"rng", table.rng},
        {"quantiles", std::move(quantiles)},
        {"draws", table.draws},
    };
}

CriticalValueTable critical_table_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::CorruptTable, "table is not a JSON object");
    const auto version = field<std::string>(doc, "version");
    if (version != kTableFormatVersion) {
        throw Error(ErrorCode::VersionMismatch, "table version '" + version + "', expected '" +
                                                     std::string(kTableFormatVersion) + "'");
    }
    CriticalValueTable table;
    try {
        table.kind = parse_stat_kind(field<std::string>(doc, "kind"));
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::CorruptTable, e.what());
    }
    table.delta = field<double>(doc, "delta");
    table.m = field<std::size_t>(doc, "m");
    table.reps = field<std::size_t>(doc, "reps");
    table.seed = field<std::uint64_t>(doc, "seed");
    table.rng = field<std::string>(doc, "rng");
    const auto quantiles = field<json>(doc, "quantiles");
    if (!quantiles.is_array()) throw Error(ErrorCode::CorruptTable, "quantiles must be an array");
    for (const auto& q : quantiles) {
        const double level = field<double>(q, "level");
        if (!table.quantiles.emplace(level, field<double>(q, "value")).second) {
            throw Error(ErrorCode::CorruptTable, "duplicate level");
        }
    }
    if (doc.contains("draws")) table.draws = field<std::vector<double>>(doc, "draws");
    table.validate();
    return table;
}

void save_critical_table(const CriticalValueTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << to_json(table).dump() << '\n';
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

CriticalValueTable load_critical_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptTable, std::string("invalid JSON: ") + e.what());
    }
    return critical_table_from_json(doc);
}

std::string table_digest(const CriticalValueTable& table) {
    json core = to_json(table);
    core.erase("draws");
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(core.dump());
    return hex.str();
}

DetectionReport detect(const Series& x, StatKind kind, TrimFraction delta,
                       const CriticalValueTable& table, std::optional<std::size_t> bandwidth) {
    if (!(table.kind == kind)) {
        throw std::invalid_argument("table holds critical values for " + to_string(table.kind) +
                                    ", not " + to_string(kind));
    }
    if (kind.family != Family::Classical && table.delta != delta.value()) {
        throw std::invalid_argument("table was simulated for delta=" + format_real(table.delta, 17));
    }
    DetectionReport report;
    report.kind = kind;
    report.n = x.size();
    report.delta = delta.value();
    if (kind.family == Family::Classical) {
        const std::size_t bw = bandwidth.value_or(default_bandwidth(x.size()));
        const LongRunVariance lrv = bartlett_lrv(x, bw);
        report.value = classical_statistic(x, kind.functional, lrv);
        report.bandwidth = bw;
        report.sigma2_hat = lrv.sigma2_hat;
        double mean = 0.0;
        for (double v : x.values()) mean += v;
        mean /= static_cast<double>(x.size());
        double s = 0.0, best = -1.0;
        for (std::size_t k = 1; k <= x.size(); ++k) {
            s += x[k - 1] - mean;
            if (std::abs(s) > best) {
                best = std::abs(s);
                report.argmax_k = k;
            }
        }
    } else {
        const StatResult result = statistic(x, delta, kind);
        report.value = result.value;
        report.argmax_k = result.argmax_k;
    }
    report.critical_values = table.quantiles;
    for (const auto& [level, cv] : table.quantiles) report.reject[level] = report.value >= cv;
    if (!table.draws.empty()) report.p_value = p_value(table.draws, report.value);
    report.table_digest = table_digest(table);
    report.table_seed = table.seed;
    return report;
}

json to_json(const DetectionReport& report) {
    json levels = json::array();
    for (const auto& [level, cv] : report.critical_values) {
        levels.push_back({{"level", level}, {"critical_value", cv}, {"reject", report.reject.at(level)}});
    }
    json doc{
        {"statistic", to_string(report.kind)},
        {"value", real_to_json(report.value)},
        {"argmax_k", report.argmax_k},
        {"n", report.n},
        {"delta", report.delta},
        {"levels", std::move(levels)},
        {"p_value", report.p_value ? json(*report.p_value) : json(nullptr)},
        {"table", {{"digest", report.table_digest}, {"seed", report.table_seed}}},
    };
    if (report.bandwidth) {
        doc["bandwidth"] = *report.bandwidth;
        doc["sigma2_hat"] = report.sigma2_hat;
    }
    return doc;
}

json to_json(const RejectionReport& report) {
    json rates = json::array();
    for (const auto& r : report.rates) {
        rates.push_back({{"level", r.level}, {"rate", r.rate}, {"std_error", r.std_error}});
    }
    return json{{"reps", report.reps},
                {"infinite", report.infinite},
                {"digest", report.digest},
                {"rates", std::move(rates)}};
}

json to_json(const std::vector<TableCellResult>& cells) {
    json out = json::array();
    for (const auto& cell : cells) {
        json levels = json::array();
        for (std::size_t lv = 0; lv < kTableLevels.size(); ++lv) {
            const double level = kTableLevels[lv];
            levels.push_back({{"level", level},
                              {"rate", cell.report.rate_at(level)},
                              {"std_error", cell.report.se_at(level)},
                              {"printed", cell.spec.printed[lv]},
                              {"anomalous", cell.spec.anomalous[lv]}});
        }
        out.push_back({{"table", to_string(cell.spec.table)},
                       {"n", cell.spec.n},
                       {"column", cell.spec.column},
                       {"reps", cell.report.reps},
                       {"digest", cell.report.digest},
                       {"levels", std::move(levels)}});
    }
    return out;
}

std::string table_csv(const std::vector<TableCellResult>& cells) {
    std::ostringstream os;
    os << "table,n,column,level,rate,std_error,printed,diff,anomalous,reps,digest\n";
    for (const auto& cell : cells) {
        for (std::size_t lv = 0; lv < kTableLevels.size(); ++lv) {
            const double level = kTableLevels[lv];
            const double rate = cell.report.rate_at(level);
            os << to_string(cell.spec.table) << ',' << cell.spec.n << ',' << cell.spec.column << ','
               << format_real(level, 10) << ',' << format_real(rate, 10) << ','
               << format_real(cell.report.se_at(level), 10) << ','
               << format_real(cell.spec.printed[lv], 10) << ','
               << format_real(rate - cell.spec.printed[lv], 10) << ','
               << (cell.spec.anomalous[lv] ? 1 : 0) << ',' << cell.report.reps << ','
               << cell.report.digest << '\n';
        }
    }
    return os.str();
}

std::string report_csv(const RejectionReport& report) {
    std::ostringstream os;
    os << "level,rate,std_error,reps,infinite,digest\n";
    for (const auto& r : report.rates) {
        os << format_real(r.level, 10) << ',' << format_real(r.rate, 10) << ','
           << format_real(r.std_error, 10) << ',' << report.reps << ',' << report.infinite << ','
           << report.digest << '\n';
    }
    return os.str();
}

}  // namespace ratiocp

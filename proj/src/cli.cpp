#include "ratiocp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "ratiocp/datagen.hpp"
#include "ratiocp/error.hpp"
#include "ratiocp/experiments.hpp"
#include "ratiocp/io.hpp"
#include "ratiocp/limit_mc.hpp"

namespace ratiocp {

namespace {

// Raised while turning options into domain objects; maps to exit status 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelOptions {
    std::string model = "iid";
    double rho = 0.0;
    double omega = 1.0;
    double alpha = 0.1;
    double beta = 0.1;
    std::vector<double> coeffs;

    void attach(CLI::App* app) {
        app->add_option("--model", model, "Error model")
            ->check(CLI::IsMember({"iid", "ar1", "garch11", "linear"}))
            ->capture_default_str();
        app->add_option("--rho", rho, "AR(1) coefficient")->capture_default_str();
        app->add_option("--omega", omega, "GARCH omega")->capture_default_str();
        app->add_option("--alpha", alpha, "GARCH alpha")->capture_default_str();
        app->add_option("--beta", beta, "GARCH beta")->capture_default_str();
        app->add_option("--coeffs", coeffs, "Linear filter coefficients a0,a1,...")->delimiter(',');
    }

    GeneratorSpec build(std::uint64_t seed) const {
        GeneratorSpec spec;
        spec.innovations.seed = seed;
        if (model == "ar1") {
            spec.model = Ar1Model{rho};
        } else if (model == "garch11") {
            spec.model = Garch11Model{omega, alpha, beta};
        } else if (model == "linear") {
            spec.model = LinearModel{coeffs};
        } else {
            spec.model = IidModel{};
        }
        try {
            validate(spec);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        return spec;
    }
};

struct ChangeOptions {
    std::string change = "none";
    double theta = 0.5;
    double delta_mag = 0.0;
    double mu = 0.0;

    void attach(CLI::App* app, const std::string& default_change) {
        change = default_change;
        app->add_option("--change", change, "Alternative")
            ->check(CLI::IsMember({"none", "shift", "stat2rw", "rw2stat"}))
            ->capture_default_str();
        app->add_option("--theta", theta, "Change location k* = floor(n theta)")->capture_default_str();
        app->add_option("--delta-mag", delta_mag, "Mean shift after k*")->capture_default_str();
        app->add_option("--mu", mu, "Baseline mean")->capture_default_str();
    }

    ChangeSpec build() const {
        Regime regime = Regime::None;
        if (change == "shift") regime = Regime::MeanShift;
        if (change == "stat2rw") regime = Regime::StatToRw;
        if (change == "rw2stat") regime = Regime::RwToStat;
        if (regime != Regime::None && !(theta > 0.0 && theta < 1.0)) {
            throw UsageError("--theta must lie in (0, 1)");
        }
        return ChangeSpec{regime, theta, delta_mag, mu};
    }
};

TrimFraction make_delta(double d) {
    try {
        return TrimFraction(d);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--delta: ") + e.what());
    }
}

StatKind make_kind(const std::string& name) {
    try {
        return parse_stat_kind(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--stat: ") + e.what());
    }
}

std::string describe_model(const ModelOptions& m) {
    std::ostringstream os;
    os << std::setprecision(17) << "model=" << m.model;
    if (m.model == "ar1") os << " rho=" << m.rho;
    if (m.model == "garch11") os << " omega=" << m.omega << " alpha=" << m.alpha << " beta=" << m.beta;
    if (m.model == "linear") {
        os << " coeffs=";
        for (std::size_t i = 0; i < m.coeffs.size(); ++i) os << (i ? "," : "") << m.coeffs[i];
    }
    return os.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ratio-type CUSUM tests for a change in the mean", "ratiocp"};
    app.require_subcommand(1);

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "Test a series for a change in the mean");
    std::string input, stat_name = "v1", table_path;
    double delta_value = 0.2;
    bool as_json = false;
    std::optional<std::size_t> bandwidth;
    detect_cmd->add_option("--input", input, "Series file, one value per line")->required();
    detect_cmd->add_option("--stat", stat_name, "v1|v2|v3|z1|z2|z3|tmax1|tmax2|tmax3|t1|t2|t3")
        ->capture_default_str();
    detect_cmd->add_option("--delta", delta_value, "Trimming fraction in (0, 0.5)")->capture_default_str();
    detect_cmd->add_option("--critvals", table_path, "Critical-value table (JSON)")->required();
    detect_cmd->add_option("--bandwidth", bandwidth, "Bartlett bandwidth for t1..t3");
    detect_cmd->add_flag("--json", as_json, "Emit a JSON report");

    // critvals
    auto* crit_cmd = app.add_subcommand("critvals", "Simulate critical values of a limit law");
    std::size_t grid = kDefaultGrid, reps = 100000;
    std::uint64_t seed = 0;
    std::string out_path;
    std::vector<double> levels = kDefaultLevels;
    unsigned threads = 0;
    bool no_draws = false;
    crit_cmd->add_option("--stat", stat_name)->capture_default_str();
    crit_cmd->add_option("--delta", delta_value)->capture_default_str();
    crit_cmd->add_option("--grid", grid, "Wiener grid resolution m")->capture_default_str();
    crit_cmd->add_option("--reps", reps, "Monte Carlo replications")->capture_default_str();
    crit_cmd->add_option("--seed", seed)->capture_default_str();
    crit_cmd->add_option("--levels", levels)->delimiter(',');
    crit_cmd->add_option("--threads", threads, "0 = all cores")->capture_default_str();
    crit_cmd->add_flag("--no-draws", no_draws, "Omit null draws (disables p-values)");
    crit_cmd->add_option("--out", out_path, "Output table")->required();

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "Simulate a series");
    ModelOptions gen_model;
    ChangeOptions gen_change;
    std::size_t n = 500;
    gen_model.attach(gen_cmd);
    gen_change.attach(gen_cmd, "none");
    gen_cmd->add_option("--n", n)->capture_default_str();
    gen_cmd->add_option("--seed", seed)->capture_default_str();
    gen_cmd->add_option("--out", out_path, "Output file ('-' for stdout)")->required();

    // size / power
    auto* size_cmd = app.add_subcommand("size", "Rejection rate under no change");
    auto* power_cmd = app.add_subcommand("power", "Rejection rate under an alternative");
    ModelOptions exp_model;
    ChangeOptions exp_change;
    std::size_t exp_reps = 2000;
    bool as_csv = false;
    for (auto* cmd : {size_cmd, power_cmd}) {
        exp_model.attach(cmd);
        cmd->add_option("--n", n)->capture_default_str();
        cmd->add_option("--reps", exp_reps)->capture_default_str();
        cmd->add_option("--stat", stat_name)->capture_default_str();
        cmd->add_option("--delta", delta_value)->capture_default_str();
        cmd->add_option("--critvals", table_path)->required();
        cmd->add_option("--seed", seed)->capture_default_str();
        cmd->add_option("--levels", levels)->delimiter(',');
        cmd->add_option("--threads", threads)->capture_default_str();
        cmd->add_flag("--csv", as_csv, "Emit CSV instead of JSON");
    }
    exp_change.delta_mag = 1.0;
    exp_change.attach(power_cmd, "shift");

    // table
    auto* table_cmd = app.add_subcommand("table", "Reproduce a published size/power table");
    std::string table_id = "T1", csv_out, json_out;
    table_cmd->add_option("--id", table_id, "T1..T9")->capture_default_str();
    table_cmd->add_option("--reps", exp_reps)->capture_default_str();
    table_cmd->add_option("--seed", seed)->capture_default_str();
    table_cmd->add_option("--critvals", table_path, "V1, delta=0.2 table")->required();
    table_cmd->add_option("--threads", threads)->capture_default_str();
    table_cmd->add_option("--csv", csv_out, "Write CSV here (default: stdout)");
    table_cmd->add_option("--json", json_out, "Write JSON grid here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        err << app.help();
        return kExitUsage;
    }

    std::function<void()> action;
    try {
        if (detect_cmd->parsed()) {
            const StatKind kind = make_kind(stat_name);
            const TrimFraction delta = make_delta(delta_value);
            action = [&, kind, delta] {
                const Series x = load_series(input);
                const CriticalValueTable table = load_critical_table(table_path);
                const DetectionReport report = detect(x, kind, delta, table, bandwidth);
                if (as_json) {
                    out << to_json(report).dump(2) << '\n';
                    return;
                }
                out << std::setprecision(17) << "statistic " << to_string(kind) << " = "
                    << report.value << " (argmax k = " << report.argmax_k << ", n = " << report.n
                    << ")\n";
                for (const auto& [level, cv] : report.critical_values) {
                    out << "  level " << level << ": critical value " << cv
                        << ", reject " << yes_no(report.reject.at(level)) << '\n';
                }
                if (report.p_value) out << "  p-value " << *report.p_value << '\n';
            };
        } else if (crit_cmd->parsed()) {
            const StatKind kind = make_kind(stat_name);
            const TrimFraction delta = make_delta(delta_value);
            if (grid < 2 || reps == 0) throw UsageError("--grid must be >= 2 and --reps >= 1");
            for (double l : levels) {
                if (!(l > 0.0 && l < 1.0)) throw UsageError("--levels must lie in (0, 1)");
            }
            action = [&, kind, delta] {
                const NullSample sample = null_sample(kind, delta, grid, reps, seed, threads);
                save_critical_table(make_critical_table(sample, levels, !no_draws), out_path);
                out << "wrote " << out_path << '\n';
            };
        } else if (gen_cmd->parsed()) {
            const GeneratorSpec spec = gen_model.build(seed);
            const ChangeSpec change = gen_change.build();
            if (n < 2) throw UsageError("--n must be >= 2");
            action = [&, spec, change] {
                const Series x = generate(n, spec, change);
                std::ostringstream note;
                note << std::setprecision(17) << describe_model(gen_model) << " n=" << n
                     << " seed=" << seed << " change=" << gen_change.change
                     << " theta=" << gen_change.theta << " delta_mag=" << gen_change.delta_mag
                     << " mu=" << gen_change.mu;
                const std::vector<std::string> comments{"generated by ratiocp", note.str()};
                if (out_path == "-") {
                    write_series(out, x, comments);
                    return;
                }
                std::ofstream file(out_path);
                if (!file) throw Error(ErrorCode::IoError, "cannot write " + out_path);
                write_series(file, x, comments);
            };
        } else if (size_cmd->parsed() || power_cmd->parsed()) {
            ExperimentConfig cfg;
            cfg.n = n;
            cfg.reps = exp_reps;
            cfg.levels = levels;
            cfg.generator = exp_model.build(0);
            cfg.change = size_cmd->parsed() ? ChangeSpec{} : exp_change.build();
            cfg.kind = make_kind(stat_name);
            cfg.delta = make_delta(delta_value);
            cfg.master_seed = seed;
            if (n < 2 || exp_reps == 0) throw UsageError("--n must be >= 2 and --reps >= 1");
            action = [&, cfg]() mutable {
                cfg.critical_values = load_critical_table(table_path);
                const RejectionReport report = run_experiment(cfg, threads);
                if (as_csv) {
                    out << report_csv(report);
                } else {
                    out << to_json(report).dump(2) << '\n';
                }
            };
        } else if (table_cmd->parsed()) {
            TableId id{};
            try {
                id = parse_table_id(table_id);
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--id: ") + e.what());
            }
            action = [&, id] {
                const CriticalValueTable table = load_critical_table(table_path);
                const auto cells = reproduce_table(id, table, exp_reps, seed, threads);
                if (csv_out.empty()) {
                    out << table_csv(cells);
                } else {
                    std::ofstream file(csv_out);
                    if (!file) throw Error(ErrorCode::IoError, "cannot write " + csv_out);
                    file << table_csv(cells);
                }
                if (!json_out.empty()) {
                    std::ofstream file(json_out);
                    if (!file) throw Error(ErrorCode::IoError, "cannot write " + json_out);
                    file << to_json(cells).dump(2) << '\n';
                }
            };
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    try {
        action();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

}  // namespace ratiocp

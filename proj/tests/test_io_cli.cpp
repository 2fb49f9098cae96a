#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ratiocp/cli.hpp"
#include "ratiocp/error.hpp"
#include "ratiocp/io.hpp"

using namespace ratiocp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Series parse(const std::string& text) {
    std::istringstream in(text);
    return parse_series(in);
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

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("ratiocp-test-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct CliRun {
    int status;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

const StatKind kV1{Family::V, Functional::MaxAbs};

CriticalValueTable tiny_table(StatKind kind = kV1) {
    return make_critical_table(null_sample(kind, TrimFraction{0.2}, 400, 400, 11, 1));
}

}  // namespace

TEST_CASE("series parsing") {
    CHECK(parse("1\n2\n3\n") == Series({1, 2, 3}));
    CHECK(parse("value\n1\n2\n") == Series({1, 2}));
    CHECK(parse("# comment\n\n1.5\n  -2e-1  \n\n").values()[1] == -0.2);
    CHECK(parse("1\r\n2\r\n") == Series({1, 2}));

    try {
        parse("1\nx\n");
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK(code_of([] { parse("1\n"); }) == ErrorCode::TooShort);
    CHECK(code_of([] { parse("value\n"); }) == ErrorCode::TooShort);
    CHECK(code_of([] { parse("1\nnan\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse("1\n2 3\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { load_series("/nonexistent/ratiocp/series.txt"); }) == ErrorCode::IoError);
}

TEST_CASE("series round trip is exact") {
    const Series x({0.1, -1.0 / 3.0, 1e-300, 12345.678901234567});
    std::ostringstream out;
    write_series(out, x, {"generated"});
    CHECK(out.str().rfind("# generated\n", 0) == 0);
    CHECK(parse(out.str()) == x);
}

TEST_CASE("critical table round trip") {
    const CriticalValueTable t = tiny_table();
    const CriticalValueTable back = critical_table_from_json(json::parse(to_json(t).dump()));
    CHECK(back.kind == t.kind);
    CHECK(back.delta == t.delta);
    CHECK(back.m == t.m);
    CHECK(back.reps == t.reps);
    CHECK(back.seed == t.seed);
    CHECK(back.rng == t.rng);
    CHECK(back.quantiles == t.quantiles);
    CHECK(back.draws == t.draws);
    CHECK(table_digest(back) == table_digest(t));

    TempDir dir;
    save_critical_table(t, dir / "t.json");
    CHECK(load_critical_table(dir / "t.json").quantiles == t.quantiles);
}

TEST_CASE("corrupt and mismatched tables are rejected") {
    const json good = to_json(tiny_table());

    json bad_version = good;
    bad_version["version"] = "2";
    CHECK(code_of([&] { critical_table_from_json(bad_version); }) == ErrorCode::VersionMismatch);

    json not_decreasing = good;
    not_decreasing["quantiles"][0]["value"] = 0.0;
    CHECK(code_of([&] { critical_table_from_json(not_decreasing); }) == ErrorCode::CorruptTable);

    json missing = good;
    missing.erase("kind");
    CHECK(code_of([&] { critical_table_from_json(missing); }) == ErrorCode::CorruptTable);

    json wrong_type = good;
    wrong_type["reps"] = "many";
    CHECK(code_of([&] { critical_table_from_json(wrong_type); }) == ErrorCode::CorruptTable);

    json short_draws = good;
    short_draws["draws"].erase(short_draws["draws"].size() - 1);
    CHECK(code_of([&] { critical_table_from_json(short_draws); }) == ErrorCode::CorruptTable);

    TempDir dir;
    std::ofstream(dir / "junk.json") << "{ not json";
    CHECK(code_of([&] { load_critical_table(dir / "junk.json"); }) == ErrorCode::CorruptTable);
}

TEST_CASE("detect report") {
    const CriticalValueTable t = tiny_table();
    std::vector<double> v(200, 0.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = z(rng) + (i >= 100 ? 3.0 : 0.0);
    const DetectionReport r = detect(Series(v), kV1, TrimFraction{0.2}, t);
    CHECK(r.value > t.at(0.01));
    CHECK(r.reject.at(0.01));
    REQUIRE(r.p_value);
    CHECK(*r.p_value == doctest::Approx(1.0 / 401.0));
    const KRange kr = k_range(200, TrimFraction{0.2});
    CHECK(r.argmax_k >= kr.lo);
    CHECK(r.argmax_k <= kr.hi);
    CHECK(r.argmax_k == statistic(Series(v), TrimFraction{0.2}, kV1).argmax_k);
    CHECK(!r.bandwidth);

    CriticalValueTable no_draws = t;
    no_draws.draws.clear();
    CHECK(!detect(Series(v), kV1, TrimFraction{0.2}, no_draws).p_value);

    CHECK_THROWS_AS(detect(Series(v), StatKind{Family::Z, Functional::MaxAbs}, TrimFraction{0.2}, t),
                    std::invalid_argument);
    CHECK_THROWS_AS(detect(Series(v), kV1, TrimFraction{0.1}, t), std::invalid_argument);

    const StatKind t1{Family::Classical, Functional::MaxAbs};
    const DetectionReport c = detect(Series(v), t1, TrimFraction{0.2}, tiny_table(t1), 4);
    CHECK(c.bandwidth == 4u);
    CHECK(c.sigma2_hat > 0.0);
    CHECK(c.argmax_k == doctest::Approx(100).epsilon(0.05));
}

TEST_CASE("real_to_json") {
    CHECK(real_to_json(1.5) == json(1.5));
    CHECK(real_to_json(std::numeric_limits<double>::infinity()) == json("inf"));
    CHECK(real_to_json(-std::numeric_limits<double>::infinity()) == json("-inf"));
}

TEST_CASE("cli end to end") {
    TempDir dir;
    const std::string table = dir / "v1.json";
    const std::string series = dir / "x.txt";

    auto crit = cli({"critvals", "--stat", "v1", "--grid", "400", "--reps", "300", "--seed", "3",
                     "--out", table});
    REQUIRE(crit.status == kExitOk);
    CHECK(load_critical_table(table).reps == 300);

    auto gen = cli({"generate", "--model", "ar1", "--rho", "0.3", "--change", "shift", "--delta-mag",
                    "2", "--n", "300", "--seed", "9", "--out", series});
    REQUIRE(gen.status == kExitOk);
    CHECK(load_series(series).size() == 300);

    auto det = cli({"detect", "--input", series, "--stat", "v1", "--critvals", table, "--json"});
    REQUIRE(det.status == kExitOk);
    const json report = json::parse(det.out);
    CHECK(report["statistic"] == "v1");
    CHECK(report["n"] == 300);
    CHECK(report["levels"].size() == 3);
    CHECK(report["levels"][0].contains("reject"));
    CHECK(report["p_value"].is_number());

    auto text = cli({"detect", "--input", series, "--stat", "v1", "--critvals", table});
    CHECK(text.status == kExitOk);
    CHECK(!text.out.empty());

    const std::string t1_table = dir / "t1.json";
    REQUIRE(cli({"critvals", "--stat", "t1", "--grid", "400", "--reps", "200", "--out", t1_table}).status ==
            kExitOk);
    auto t1 = cli({"detect", "--input", series, "--stat", "t1", "--critvals", t1_table, "--bandwidth", "3",
                   "--json"});
    REQUIRE(t1.status == kExitOk);
    CHECK(json::parse(t1.out)["bandwidth"] == 3);

    auto stdout_gen = cli({"generate", "--n", "5", "--out", "-"});
    CHECK(stdout_gen.status == kExitOk);
    CHECK(parse(stdout_gen.out).size() == 5);

    auto size = cli({"size", "--n", "100", "--reps", "50", "--critvals", table, "--threads", "1"});
    REQUIRE(size.status == kExitOk);
    CHECK(json::parse(size.out)["reps"] == 50);

    auto power = cli({"power", "--model", "garch11", "--n", "100", "--reps", "50", "--critvals", table,
                      "--csv"});
    REQUIRE(power.status == kExitOk);
    CHECK(power.out.find("level") != std::string::npos);

    const std::string csv = dir / "t8.csv";
    const std::string grid = dir / "t8.json";
    auto tab = cli({"table", "--id", "T8", "--reps", "10", "--critvals", table, "--csv", csv, "--json",
                    grid});
    REQUIRE(tab.status == kExitOk);
    std::ifstream csv_in(csv);
    std::string header;
    std::getline(csv_in, header);
    CHECK(header.find("printed") != std::string::npos);
    std::size_t rows = 0;
    for (std::string line; std::getline(csv_in, line);) rows += !line.empty();
    CHECK(rows == 12 * 3);
}

TEST_CASE("cli exit codes") {
    TempDir dir;
    const std::string table = dir / "v1.json";
    save_critical_table(tiny_table(), table);
    const std::string series = dir / "x.txt";
    std::ofstream(series) << "1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n";
    const std::string bad = dir / "bad.txt";
    std::ofstream(bad) << "1\noops\n";

    CHECK(cli({}).status == kExitUsage);
    CHECK(cli({"frobnicate"}).status == kExitUsage);
    CHECK(cli({"detect", "--input", series}).status == kExitUsage);
    CHECK(cli({"detect", "--input", series, "--critvals", table, "--delta", "0.6"}).status == kExitUsage);
    CHECK(cli({"detect", "--input", series, "--critvals", table, "--stat", "w9"}).status == kExitUsage);
    CHECK(cli({"generate", "--model", "ar1", "--rho", "1.5", "--out", "-"}).status == kExitUsage);

    const auto parse_fail = cli({"detect", "--input", bad, "--critvals", table});
    CHECK(parse_fail.status == kExitData);
    CHECK(parse_fail.err.find("line 2") != std::string::npos);
    CHECK(cli({"detect", "--input", dir / "missing.txt", "--critvals", table}).status == kExitData);
    CHECK(cli({"detect", "--input", series, "--critvals", table, "--stat", "z1"}).status == kExitData);
    CHECK(cli({"detect", "--input", series, "--critvals", dir / "none.json"}).status == kExitData);
    CHECK(cli({"--help"}).status == kExitOk);
}

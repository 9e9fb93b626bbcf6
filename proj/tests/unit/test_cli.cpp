#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "ibdwaves_cli/commands.hpp"
#include "ibdwaves_cli/csv.hpp"
#include "ibdwaves_cli/manifest.hpp"
#include "ibdwaves_cli/validation.hpp"

namespace fs = std::filesystem;
using namespace ibdwaves::cli;

namespace {

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("ibdwaves_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run(const std::string& args) {
    const std::string cmd = std::string(IBDWAVES_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST(ParseValues, Forms) {
    EXPECT_EQ(parse_values("0.5"), std::vector<double>{0.5});
    EXPECT_EQ(parse_values("1,2,3").size(), 3u);
    const auto r = parse_values("0.1:0.5:0.1");
    ASSERT_EQ(r.size(), 5u);
    EXPECT_NEAR(r.back(), 0.5, 1e-12);
    EXPECT_THROW(parse_values(""), UsageError);
    EXPECT_THROW(parse_values("0.5:0.1:0.1"), UsageError);
    EXPECT_THROW(parse_values("abc"), UsageError);
}

TEST(GlobalOptions, SigmaAdjustsBeta1) {
    GlobalOptions g;
    g.alpha2 = 2.0;
    const auto p = g.params(0.5);
    EXPECT_DOUBLE_EQ(p.sigma(), 0.5);
    EXPECT_DOUBLE_EQ(p.alpha2(), 2.0);
}

TEST(Csv, FixedFormatting) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(2.0), "2");
    const auto d = scratch("csv");
    {
        CsvWriter w(d / "a.csv", {"x", "label"});
        w.row({1.5, std::string("u")});
    }
    EXPECT_EQ(slurp(d / "a.csv"), "x,label\n1.5,u\n");
    const auto t = read_csv(d / "a.csv");
    EXPECT_EQ(t.column("label"), 1u);
    EXPECT_THROW(t.column("nope"), std::exception);
}

TEST(Manifest, ChecksumsMatchFiles) {
    const auto d = scratch("manifest");
    std::ofstream(d / "f.txt") << "abc";
    EXPECT_EQ(sha256_file(d / "f.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    RunManifest m("unit", {{"k", 1}});
    m.add_output(d / "f.txt");
    const auto j = read_json(m.write(d));
    EXPECT_EQ(j["command"], "unit");
    ASSERT_EQ(j["outputs"].size(), 1u);
    EXPECT_EQ(j["outputs"][0]["sha256"], sha256_file(d / "f.txt"));
}

TEST(ExitCodes, UsageErrors) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("no-such-command"), 2);
    EXPECT_EQ(run("speed-curve --sigma '' --out " + scratch("empty").string()), 2);
    EXPECT_EQ(run("speed-curve --sigma 0.9:0.1:0.1 --out " + scratch("rev").string()), 2);
    EXPECT_EQ(run("--version"), 0);
}

TEST(SpeedCurve, DeterministicBytesAndManifest) {
    const auto a = scratch("sc_a"), b = scratch("sc_b");
    const std::string args = "speed-curve --sigma 0.2,0.5,0.9,1.25 --methods shoot,asym --out ";
    ASSERT_EQ(run(args + a.string()), 0);
    ASSERT_EQ(run("--threads 3 " + args + b.string()), 0);
    EXPECT_EQ(slurp(a / "speed_curve.csv"), slurp(b / "speed_curve.csv"));
    EXPECT_TRUE(fs::exists(a / "speed_curve.svg"));
    const auto m = read_json(a / "manifest.json");
    EXPECT_EQ(m["command"], "speed-curve");
    EXPECT_TRUE(m.contains("version"));
    EXPECT_TRUE(m.contains("wall_time_seconds"));
    for (const auto& o : m["outputs"]) EXPECT_EQ(o["sha256"], sha256_file(a / o["file"].get<std::string>()));
    const auto t = read_csv(a / "speed_curve.csv");
    EXPECT_EQ(t.header, (std::vector<std::string>{"sigma", "v", "method", "delta"}));
}

TEST(SpeedCurve, ShootingAndAsymptoticsAgreeAtEnds) {
    const auto d = scratch("sc_ends");
    ASSERT_EQ(run("speed-curve --sigma 0.05,0.95 --methods shoot,asym --delta 0.01 --out " + d.string()), 0);
    const auto t = read_csv(d / "speed_curve.csv");
    const auto cs = t.column("sigma"), cv = t.column("v"), cm = t.column("method");
    std::map<std::string, std::map<std::string, double>> v;
    for (const auto& r : t.rows) v[r[cs]][r[cm].substr(0, 4)] = std::stod(r[cv]);
    for (const auto& [s, m] : v) EXPECT_NEAR(m.at("asym") / m.at("shoo"), 1.0, s == "0.050000000000000003" ? 0.3 : 0.05) << s;
}

TEST(Simulate, ThresholdStatus) {
    const auto d = scratch("sim_below");
    ASSERT_EQ(run("simulate --sigma 0.75 --M0 0.1 --I0 0.5 --t-end 2 --snapshots 4 --out " + d.string()), 0);
    const auto r = read_json(d / "report.json");
    EXPECT_EQ(r["status"], "no propagation: below threshold max(1-sigma,0)");
    EXPECT_TRUE(fs::exists(d / "snapshots.csv"));
    EXPECT_TRUE(fs::exists(d / "fronts.csv"));
    EXPECT_TRUE(fs::exists(d / "manifest.json"));
}

TEST(Simulate, NoMutantSingleFront) {
    const auto d = scratch("sim_nomutant");
    ASSERT_EQ(run("simulate --sigma 4 --M0 0 --I0 0.6 --t-end 1 --snapshots 4 --out " + d.string()), 0);
    EXPECT_EQ(read_json(d / "report.json")["status"], "no mutant: M stays 0");
    const auto t = read_csv(d / "snapshots.csv");
    const auto cM = t.column("M");
    for (const auto& r : t.rows) EXPECT_EQ(std::stod(r[cM]), 0.0);
}

TEST(Simulate, InvalidInitialDataIsUsageError) {
    EXPECT_EQ(run("simulate --sigma 0.75 --M0 1 --I0 0 --out " + scratch("sim_bad").string()), 2);
}

TEST(ConfigFile, PresetsAndOverride) {
    const auto d = scratch("config");
    std::ofstream(d / "run.ini") << "delta = 0.5\n";
    ASSERT_EQ(run("--config " + (d / "run.ini").string() + " tbp --sigma 0.5 --out " + d.string()), 0);
    EXPECT_DOUBLE_EQ(read_json(d / "manifest.json")["parameters"]["delta"].get<double>(), 0.5);
    ASSERT_EQ(run("--config " + (d / "run.ini").string() + " --delta 0.02 tbp --sigma 0.5 --out " + d.string()), 0);
    EXPECT_DOUBLE_EQ(read_json(d / "manifest.json")["parameters"]["delta"].get<double>(), 0.02);
}

TEST(Validate, TamperNegativeControl) {
    ValidationOptions clean;
    for (int k = 1; k <= kCriterionCount; ++k)
        if (k != 4) clean.skip.insert(k);
    auto res = run_validation(clean);
    EXPECT_TRUE(all_passed(res));
    ValidationOptions tampered = clean;
    tampered.tamper = 1.3;
    res = run_validation(tampered);
    EXPECT_FALSE(all_passed(res));
    EXPECT_EQ(res[3].verdict, Verdict::Fail);
    EXPECT_EQ(res[0].verdict, Verdict::Skip);
}

TEST(Validate, PartialSkipWritesJson) {
    const auto d = scratch("validate");
    EXPECT_EQ(run("validate --skip 1,2,3,4,5,6,7,8,9,10 --out " + d.string()), 0);
    const auto j = read_json(d / "validation.json");
    ASSERT_TRUE(j.is_object() || j.is_array());
}

#include <tscs/csv.hpp>
#include <tscs/model.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const std::string kCli = TSCS_CLI_PATH;
const fs::path kDir = TSCS_SCENARIO_DIR;

int run(const std::string& args) {
    const std::string cmd = "\"" + kCli + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tscs_cli_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string l; std::getline(in, l);) ++n;
    return n;
}

}  // namespace

TEST(Cli, VersionAndHelpExitZero) {
    EXPECT_EQ(run("--version"), 0);
    EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("simulate"), 1);
    EXPECT_EQ(run("frobnicate"), 1);
}

TEST(Cli, InvalidScenarioExitsOne) {
    const fs::path d = scratch("bad");
    std::ofstream(d / "bad.json") << "{\"schema_version\": 1, \"bogus\": 2}";
    EXPECT_EQ(run("simulate --scenario " + (d / "bad.json").string() + " --out " + (d / "o").string()), 1);
    EXPECT_EQ(run("simulate --scenario " + (d / "absent.json").string()), 1);
    fs::remove_all(d);
}

TEST(Cli, SimulateWritesOneRowPerSample) {
    const fs::path d = scratch("sim");
    ASSERT_EQ(run("simulate --scenario " + (kDir / "small.json").string() + " --out " + d.string()), 0);
    for (const char* b : {"square_fast", "burst_drift"}) {
        EXPECT_EQ(line_count(d / b / "cells.csv"), 2001u) << b;
        EXPECT_EQ(line_count(d / b / "blocks.csv"), 2001u) << b;
    }
    fs::remove_all(d);
}

TEST(Cli, AnalyzeCsvAndJson) {
    const fs::path d = scratch("an");
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> x, y;
    for (int i = 0; i < 400; ++i) x.push_back(1e6 * (2 + g(rng)));
    for (int i = 0; i < 400; ++i) y.push_back(i >= 3 ? 40 + 1e-6 * x[static_cast<std::size_t>(i - 3)] : 42.0);
    tscs::write_trace_csv(d / "inst.csv", tscs::Trace(2e-3, {"fu0"}, x, tscs::Unit::instructions));
    tscs::write_trace_csv(d / "temp.csv", tscs::Trace(2e-3, {"fu0"}, y, tscs::Unit::celsius));
    const std::string io = " --inst " + (d / "inst.csv").string() + " --temp " + (d / "temp.csv").string() +
                           " --out " + d.string() + " --skip 0 --window 100 --stride 100 --k-max 5";
    ASSERT_EQ(run("analyze" + io), 0);
    const std::string csv = tscs::read_file(d / "analysis.csv");
    EXPECT_NE(csv.find("delay_k,3"), std::string::npos) << csv;
    ASSERT_EQ(run("analyze" + io + " --format json"), 0);
    EXPECT_TRUE(fs::exists(d / "analysis.json"));
    EXPECT_EQ(run("analyze" + io + " --format xml"), 1);
    fs::remove_all(d);
}

#include <tscs/scenario.hpp>

#include <gtest/gtest.h>

using namespace tscs;

namespace {

const std::filesystem::path kDir = TSCS_SCENARIO_DIR;

std::string reference_text() { return read_file(kDir / "reference.json"); }

std::string error_of(const std::string& text, const std::filesystem::path& path) {
    try {
        parse_scenario(text, path);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Scenario, ParsesReference) {
    const Scenario sc = load_scenario(kDir / "reference.json");
    EXPECT_EQ(sc.name, "reference");
    EXPECT_EQ(sc.benchmarks.size(), 15u);
    EXPECT_EQ(sc.pairs.size(), 8u);
    EXPECT_EQ(sc.stack.layers.size(), 3u);
    EXPECT_EQ(sc.grid.rows, 4u);
    EXPECT_TRUE(sc.kp_auto);
    EXPECT_EQ(sc.controller.security_level, 7);
    EXPECT_EQ(sc.sweep.size(), 8u);
    EXPECT_EQ(sc.sensors.size(), 3u);
    ASSERT_TRUE(sc.attenuation.has_value());
    EXPECT_EQ(sc.attenuation->layers, (std::vector<int>{0, 1, 2, 3}));
    EXPECT_EQ(sc.metrics.svf.skip, 300u);
    EXPECT_DOUBLE_EQ(sc.dt, 1e-4);
}

TEST(Scenario, SmallUsesBenchmarkSubset) {
    const Scenario sc = load_scenario(kDir / "small.json");
    ASSERT_EQ(sc.benchmarks.size(), 2u);
    EXPECT_EQ(sc.benchmarks[0].name, "square_fast");
    EXPECT_EQ(sc.benchmarks[1].name, "burst_drift");
}

TEST(Scenario, UnknownKeyReportsFileAndLine) {
    std::string text = reference_text();
    text.insert(text.find("\"seed\""), "\"bogus\": 1,\n  ");
    const std::string err = error_of(text, kDir / "reference.json");
    EXPECT_NE(err.find("reference.json:4"), std::string::npos) << err;
    EXPECT_NE(err.find("bogus"), std::string::npos) << err;
}

TEST(Scenario, MissingFloorplanNamesPath) {
    std::string text = reference_text();
    const auto at = text.find("reference_floorplan.csv");
    text.replace(at, 23, "missing.csv");
    const std::string err = error_of(text, kDir / "reference.json");
    EXPECT_NE(err.find("missing.csv"), std::string::npos) << err;
}

TEST(Scenario, MalformedJsonHasLine) {
    const std::string err = error_of("{\n  \"schema_version\": 1,\n  oops\n}", kDir / "x.json");
    EXPECT_NE(err.find("x.json:3"), std::string::npos) << err;
}

TEST(Scenario, WrongSchemaVersion) {
    std::string text = reference_text();
    text.replace(text.find("\"schema_version\": 1"), 19, "\"schema_version\": 2");
    EXPECT_NE(error_of(text, kDir / "reference.json").find("schema_version"), std::string::npos);
}

TEST(Scenario, SeedOverrideChangesWorkloads) {
    const Scenario a = load_scenario(kDir / "small.json");
    const Scenario b = load_scenario(kDir / "small.json", 99);
    EXPECT_EQ(b.seed, 99u);
    EXPECT_NE(a.benchmarks[1].inst.values(), b.benchmarks[1].inst.values());
    const Scenario c = load_scenario(kDir / "small.json", 99);
    EXPECT_EQ(b.benchmarks[1].inst.values(), c.benchmarks[1].inst.values());
}

TEST(Scenario, PairMustUseGenerator) {
    std::string text = reference_text();
    text.replace(text.find("\"generator\": \"gen0\""), 19, "\"generator\": \"fu1\"");
    EXPECT_NE(error_of(text, kDir / "reference.json").find("noise_generator"), std::string::npos);
}

TEST(Scenario, MissingFile) { EXPECT_THROW(load_scenario(kDir / "nope.json"), ValidationError); }

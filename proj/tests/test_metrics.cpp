#include <tscs/metrics.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tscs;

namespace {

Trace random_trace(std::mt19937_64& rng, std::size_t n, std::size_t w, Unit unit = Unit::instructions) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n * w);
    for (double& x : v) x = g(rng);
    std::vector<std::string> ch;
    for (std::size_t c = 0; c < w; ++c) ch.push_back("ch" + std::to_string(c));
    return Trace(2e-3, ch, v, unit);
}

/// y[i] = a * x[i - k] + b for i >= k; the first k samples are noise.
Trace delayed_affine(const Trace& x, std::size_t k, double a, double b, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(x.num_samples());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i >= k ? a * x.at(i - k, 0) + b : g(rng);
    return Trace(x.sample_interval(), {"t"}, v, Unit::celsius);
}

}  // namespace

TEST(StandardizedEuclidean, Examples) {
    const std::vector<double> x{1, 2}, y{3, 4}, s{1, 2};
    EXPECT_NEAR(standardized_euclidean(x, y, s), std::sqrt(5.0), 1e-15);
    EXPECT_EQ(standardized_euclidean(x, x, s), 0.0);
    const std::vector<double> s0{0, 1}, a{5, 1}, b{9, 1};
    EXPECT_EQ(standardized_euclidean(a, b, s0), 0.0);
    EXPECT_THROW(standardized_euclidean(x, std::vector<double>{1}, s), ValidationError);
}

TEST(SimilarityVector, ConstantTraceGivesZeros) {
    Trace t(1.0, {"a"}, std::vector<double>(6, 3.0), Unit::celsius);
    for (const auto& e : similarity_vector(t, {0, 6}).entries) EXPECT_EQ(e.distance, 0.0);
}

TEST(SimilarityVector, PairCount) {
    std::mt19937_64 rng(1);
    const Trace t = random_trace(rng, 20, 3);
    EXPECT_EQ(similarity_vector(t, {2, 12}).entries.size(), 45u);
}

TEST(SimilarityVector, ThreeSampleHandEvaluation) {
    Trace t(1.0, {"a"}, {0, 1, 3}, Unit::celsius);
    const auto sv = similarity_vector(t, {0, 3});
    const double s = std::sqrt(((0 - 4.0 / 3) * (0 - 4.0 / 3) + (1 - 4.0 / 3) * (1 - 4.0 / 3) +
                                (3 - 4.0 / 3) * (3 - 4.0 / 3)) / 2.0);
    ASSERT_EQ(sv.entries.size(), 3u);
    std::vector<double> d;
    for (const auto& e : sv.entries) d.push_back(e.distance);
    std::sort(d.begin(), d.end());
    EXPECT_NEAR(d[0], 1.0 / s, 1e-14);
    EXPECT_NEAR(d[1], 2.0 / s, 1e-14);
    EXPECT_NEAR(d[2], 3.0 / s, 1e-14);
}

TEST(SimilarityVector, WindowChecks) {
    Trace t(1.0, {"a"}, {0, 1, 3}, Unit::celsius);
    EXPECT_THROW(similarity_vector(t, {0, 2}), ValidationError);
    EXPECT_THROW(similarity_vector(t, {0, 4}), ValidationError);
}

TEST(Pearson, Examples) {
    const std::vector<double> x{1, 2, 3};
    EXPECT_NEAR(pearson(x, std::vector<double>{2, 4, 6}).r, 1.0, 1e-15);
    EXPECT_NEAR(pearson(x, std::vector<double>{3, 2, 1}).r, -1.0, 1e-15);
    const auto c = pearson(x, std::vector<double>{5, 5, 5});
    EXPECT_EQ(c.r, 0.0);
    EXPECT_TRUE(c.zero_variance);
    EXPECT_THROW(pearson(x, std::vector<double>{1, 2}), ValidationError);
}

TEST(Svf, AffineDelayedImageScoresOne) {
    std::mt19937_64 rng(2);
    const Trace x = random_trace(rng, 60, 1);
    const Trace y = delayed_affine(x, 4, 2.5, 40.0, rng);
    const auto r = svf(x, y, 4, {0, 50});
    EXPECT_NEAR(r.svf, 1.0, 1e-12);
    EXPECT_EQ(r.delay_k, 4u);
}

TEST(Svf, NegativeScaleStillScoresOne) {
    // Distances are invariant under sign flips.
    std::mt19937_64 rng(3);
    const Trace x = random_trace(rng, 40, 1);
    const Trace y = delayed_affine(x, 0, -3.0, 1.0, rng);
    EXPECT_NEAR(svf(x, y, 0, {0, 40}).svf, 1.0, 1e-12);
}

TEST(Svf, IndependentRandomTracesScoreLow) {
    std::mt19937_64 rng(4);
    const Trace x = random_trace(rng, 200, 2);
    const Trace y = random_trace(rng, 200, 1, Unit::celsius);
    EXPECT_LT(std::abs(svf(x, y, 0, {0, 200}).svf), 0.2);
}

TEST(Svf, FourSampleBruteForce) {
    Trace x(1.0, {"a"}, {1, 4, 2, 8}, Unit::instructions);
    Trace y(1.0, {"t"}, {40.1, 40.9, 40.2, 41.5}, Unit::celsius);
    EXPECT_NEAR(svf(x, y, 0, {0, 4}).svf, static_cast<double>(oracle::svf(x, y, 0, 0, 4)), 1e-12);
}

TEST(Svf, InsufficientSamples) {
    Trace x(1.0, {"a"}, {1, 4, 2, 8}, Unit::instructions);
    EXPECT_THROW(svf(x, x, 1, {0, 4}), ValidationError);
    Trace other(2.0, {"a"}, {1, 4, 2, 8}, Unit::instructions);
    EXPECT_THROW(svf(x, other, 0, {0, 4}), ValidationError);
}

TEST(BestDelay, RecoversShift) {
    std::mt19937_64 rng(5);
    const Trace x = random_trace(rng, 400, 1);
    const Trace y = delayed_affine(x, 5, 0.8, 50.0, rng);
    const auto r = best_delay(x, y, 20, {100, 50, 0});
    EXPECT_EQ(r.delay_k, 5u);
    EXPECT_NEAR(r.svf, 1.0, 1e-12);
}

TEST(BestDelay, KMaxZero) {
    std::mt19937_64 rng(6);
    const Trace x = random_trace(rng, 100, 1);
    const Trace y = delayed_affine(x, 5, 0.8, 50.0, rng);
    EXPECT_EQ(best_delay(x, y, 0, {50, 50, 0}).delay_k, 0u);
}

TEST(SvfTrace, PoolsWindows) {
    std::mt19937_64 rng(7);
    const Trace x = random_trace(rng, 30, 2);
    const Trace y = random_trace(rng, 30, 1, Unit::celsius);
    // Two windows [0,10) and [10,20): pooled coefficient from both pair sets.
    const auto r = svf_trace(x, y, 0, {10, 10, 0});
    EXPECT_EQ(r.num_pairs, 135u);  // windows [0,10), [10,20), [20,30)
    const auto w = svf_windows(30, 30, 0, {10, 10, 0});
    ASSERT_EQ(w.size(), 3u);
}

TEST(Stsf, Examples) {
    EXPECT_EQ(stsf(8, 1).stsf, 0.0);
    EXPECT_NEAR(stsf(8, 8).stsf, 1.0, 1e-15);
    EXPECT_NEAR(stsf(4, 2).stsf, (std::log(24.0) - 2 * std::log(2.0)) / std::log(24.0), 1e-14);
    EXPECT_NEAR(stsf(4, 2).stsf, 0.5638, 5e-5);
    EXPECT_NEAR(stsf(8, 4).stsf, 0.7386, 1e-4);
    EXPECT_NEAR(stsf(8, 4).stsf, static_cast<double>(oracle::stsf(8, 4)), 1e-12);
    EXPECT_THROW(stsf(8, 3), ValidationError);
    EXPECT_THROW(stsf(0, 1), ValidationError);
    EXPECT_THROW(stsf(4, 5), ValidationError);
}

TEST(GroupBlocks, SortAndSplit) {
    const std::map<std::string, double> t{{"a", 50}, {"b", 40}, {"c", 45}, {"d", 42}};
    const auto g = group_blocks(t, 2);
    EXPECT_EQ(g[0], (std::vector<std::string>{"a", "c"}));
    EXPECT_EQ(g[1], (std::vector<std::string>{"d", "b"}));
    EXPECT_EQ(group_blocks(t, 1).size(), 1u);
    for (const auto& grp : group_blocks(t, 4)) EXPECT_EQ(grp.size(), 1u);
    EXPECT_THROW(group_blocks(t, 3), ValidationError);
}

TEST(EffectiveGroups, Examples) {
    EXPECT_EQ(effective_groups({45.0, 45.05, 45.02, 45.08}, 0.1), 1u);
    EXPECT_EQ(effective_groups({40, 41, 42, 43}, 0.1), 4u);
    EXPECT_EQ(effective_groups({50.0, 49.95, 45.0, 44.9}, 0.1), 2u);
    // three runs among four blocks round down to a divisor
    EXPECT_EQ(effective_groups({50, 49.95, 45, 40}, 0.1), 2u);
    EXPECT_THROW(effective_groups({1, 2}, 0.0), ValidationError);
}

TEST(Mpu, Examples) {
    Trace a(1.0, {"g"}, {1, 3}, Unit::watts);
    EXPECT_DOUBLE_EQ(mpu(a, a), 1.0);
    Trace z(1.0, {"g"}, {0, 0}, Unit::watts);
    EXPECT_DOUBLE_EQ(mpu(z, a), 0.0);
    Trace two(1.0, {"g"}, {2, 2}, Unit::watts), eight(1.0, {"g"}, {8, 8}, Unit::watts);
    EXPECT_DOUBLE_EQ(mpu(two, eight), 0.25);
}

TEST(PowerOverhead, Examples) {
    Trace tot(1.0, {"p"}, {100, 100}, Unit::watts);
    Trace z(1.0, {"g"}, {0, 0}, Unit::watts);
    EXPECT_DOUBLE_EQ(power_overhead(z, tot), 0.0);
    Trace g(1.0, {"g"}, {3.83, 3.83}, Unit::watts);
    EXPECT_NEAR(power_overhead(g, tot), 0.0383, 1e-15);
    EXPECT_DOUBLE_EQ(power_overhead(tot, tot), 1.0);
}

TEST(ScaledSvf, Examples) {
    EXPECT_DOUBLE_EQ(scaled_svf(0.4, 0.5), 0.2);
    EXPECT_DOUBLE_EQ(scaled_svf(0.73, 1.0), 0.73);
    EXPECT_DOUBLE_EQ(scaled_svf(0.39, 0.0), 0.0);
}

TEST(GeometricMeanAbs, FloorAndSigns) {
    const std::vector<double> v{0.5, -0.5};
    EXPECT_NEAR(geometric_mean_abs(v), 0.5, 1e-15);
    const std::vector<double> z{0.0, 1.0};
    EXPECT_NEAR(geometric_mean_abs(z), std::sqrt(1e-4), 1e-15);
}

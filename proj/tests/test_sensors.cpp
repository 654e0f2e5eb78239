#include <tscs/sensors.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

using namespace tscs;

namespace {

struct Grid3 {
    test::RandomChip chip = test::pair_chip(2);
    ThermalNetwork net;
    Trace cells;
    Grid3() {
        chip.stack.layers.push_back({2e-5, 150.0, 1.75e6, 0.0});
        net = build_network(chip.fp, chip.stack, chip.grid);
        std::vector<double> v;
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t c = 0; c < net.num_cells(); ++c) v.push_back(40.0 + static_cast<double>(c) + 0.1 * i);
        cells = Trace(1e-3, net.cell_names(), v, Unit::celsius);
    }
};

}  // namespace

TEST(Quantize, HalfEven) {
    EXPECT_DOUBLE_EQ(quantize(44.26, 0.5), 44.5);
    EXPECT_DOUBLE_EQ(quantize(44.25, 0.5), 44.0);
    EXPECT_DOUBLE_EQ(quantize(44.75, 0.5), 45.0);
    EXPECT_DOUBLE_EQ(quantize(44.26, 0.0), 44.26);
}

TEST(Observe, BuiltinSingleCellIsIdentity) {
    Grid3 g;
    SensorConfig cfg;
    cfg.region = {{3, 1.0}};
    const Trace o = observe(g.cells, cfg, g.net, 0);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(o.at(i, 0), g.cells.at(i, 3));
}

TEST(Observe, BuiltinBlockRegionAverages) {
    Grid3 g;
    SensorConfig cfg;
    cfg.region = region_of_blocks(g.net, {"f0"});
    const Trace o = observe(g.cells, cfg, g.net, 0);
    EXPECT_NEAR(o.at(0, 0), block_temperatures(g.cells, {"f0"}, g.net).at(0, 0), 1e-12);
}

TEST(Observe, IrImageOneChannelPerTopCell) {
    Grid3 g;
    SensorConfig cfg;
    cfg.id = "ir";
    cfg.mode = SensorMode::ir_image;
    const Trace o = observe(g.cells, cfg, g.net, 0);
    EXPECT_EQ(o.num_channels(), g.net.rows() * g.net.cols());
    EXPECT_EQ(o.at(2, 0), g.cells.at(2, g.net.cell_index(2, 0, 0)));
    cfg.ir_blur_radius = 1;
    const Trace b = observe(g.cells, cfg, g.net, 0);
    const double avg = (g.cells.at(0, g.net.cell_index(2, 0, 0)) + g.cells.at(0, g.net.cell_index(2, 0, 1)) +
                        g.cells.at(0, g.net.cell_index(2, 1, 0)) + g.cells.at(0, g.net.cell_index(2, 1, 1))) /
                       4.0;
    EXPECT_NEAR(b.at(0, 0), avg, 1e-12);
}

TEST(Observe, ExternalProbeMustSitOnSurface) {
    Grid3 g;
    SensorConfig cfg;
    cfg.mode = SensorMode::external;
    cfg.location = {1, 0, 0};
    EXPECT_THROW(observe(g.cells, cfg, g.net, 0), ValidationError);
    cfg.location = {2, 1, 3};
    EXPECT_EQ(observe(g.cells, cfg, g.net, 0).at(4, 0), g.cells.at(4, g.net.cell_index(2, 1, 3)));
    cfg.location = {0, 5, 0};
    EXPECT_THROW(observe(g.cells, cfg, g.net, 0), ValidationError);
}

TEST(Observe, NoiseIsSeededAndQuantized) {
    Grid3 g;
    SensorConfig cfg;
    cfg.region = {{0, 1.0}};
    cfg.noise_std = 0.05;
    cfg.quantization = 0.25;
    const Trace a = observe(g.cells, cfg, g.net, 9), b = observe(g.cells, cfg, g.net, 9);
    EXPECT_EQ(a.values(), b.values());
    for (double v : a.values()) EXPECT_DOUBLE_EQ(v, quantize(v, 0.25));
}

TEST(Observe, ResamplesToSensorInterval) {
    Grid3 g;
    SensorConfig cfg;
    cfg.region = {{0, 1.0}};
    cfg.sample_interval = 5e-3;
    EXPECT_EQ(observe(g.cells, cfg, g.net, 0).num_samples(), 1u);
}

TEST(LayerAttenuation, SingleLayerCandidate) {
    test::RandomChip c = test::pair_chip(1);
    AttenuationSetup s;
    s.floorplan = c.fp;
    s.stack = c.stack;
    s.grid = c.grid;
    s.block = "f0";
    std::vector<double> p, n;
    for (std::size_t i = 0; i < 60; ++i) {
        n.push_back(static_cast<double>((i * 7) % 11));
        p.push_back(0.5 + 0.1 * n.back());
    }
    s.power = Trace(2e-3, {"f0"}, p, Unit::watts);
    s.inst = Trace(2e-3, {"f0"}, n, Unit::instructions);
    s.sensor.mode = SensorMode::external;
    s.sensor.location = {1, 0, 0};
    s.svf = {20, 20, 0};
    s.k_max = 2;
    const auto out = layer_attenuation_experiment(s, {0});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].layer, 0);
    EXPECT_GT(out[0].report.abs_svf, 0.9);
    s.block = "nope";
    EXPECT_THROW(layer_attenuation_experiment(s, {0}), ValidationError);
}

#pragma once

// Small fixtures shared by the unit, property and acceptance tests.

#include <tscs/thermal.hpp>

#include <Eigen/SparseCore>

#include <random>
#include <string>
#include <vector>

namespace tscs::test {

/// Floorplan-free RC circuit: cells in a chain, each with its own ambient
/// conductance and capacitance, neighbours joined by `g_link`. Every cell is
/// also a block named "c<i>".
inline ThermalNetwork rc_chain(const std::vector<double>& g_amb, const std::vector<double>& cap, double g_link,
                               double ambient = 45.0) {
    const auto n = static_cast<Eigen::Index>(g_amb.size());
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = g_amb[static_cast<std::size_t>(i)];
        if (i > 0) {
            d += g_link;
            t.emplace_back(i, i - 1, -g_link);
        }
        if (i + 1 < n) {
            d += g_link;
            t.emplace_back(i, i + 1, -g_link);
        }
        t.emplace_back(i, i, d);
    }
    ThermalNetwork::SparseMatrix g(n, n);
    g.setFromTriplets(t.begin(), t.end());
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(cap.data(), n);
    Eigen::VectorXd ga = Eigen::Map<const Eigen::VectorXd>(g_amb.data(), n);
    auto net = ThermalNetwork::from_matrices(std::move(g), std::move(c), std::move(ga), ambient);
    for (std::size_t i = 0; i < g_amb.size(); ++i) net.add_block("c" + std::to_string(i), {{i}, {1.0}});
    return net;
}

inline LayerStack uniform_stack(std::size_t layers, double thickness = 1e-4, double w_mm = 4.0, double h_mm = 4.0) {
    LayerStack s;
    for (std::size_t i = 0; i < layers; ++i) s.layers.push_back({thickness, 150.0, 1.75e6, 0.0});
    s.die_width = w_mm;
    s.die_height = h_mm;
    s.ambient_temperature = 45.0;
    s.boundary_resistance_bottom = 1e-5;
    s.boundary_resistance_top = 1e-3;
    return s;
}

/// Random stack and floorplan with blocks on every layer.
struct RandomChip {
    Floorplan fp;
    LayerStack stack;
    GridSpec grid;
};

inline RandomChip random_chip(std::mt19937_64& rng, std::size_t layers, std::size_t rows, std::size_t cols) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RandomChip c;
    c.stack.die_width = 8.0;
    c.stack.die_height = 8.0;
    c.stack.ambient_temperature = 40.0 + 10.0 * u(rng);
    c.stack.boundary_resistance_bottom = 1e-5 * (1.0 + 9.0 * u(rng));
    c.stack.boundary_resistance_top = u(rng) < 0.5 ? std::numeric_limits<double>::infinity() : 1e-3 * (1.0 + u(rng));
    for (std::size_t l = 0; l < layers; ++l)
        c.stack.layers.push_back({2e-5 + 2e-4 * u(rng), 50.0 + 150.0 * u(rng), 1e6 + 1e6 * u(rng),
                                  l + 1 < layers && u(rng) < 0.3 ? 1e-6 * u(rng) : 0.0});
    c.grid = {rows, cols, kDefaultCellBudget};
    for (std::size_t l = 0; l < layers; ++l)
        for (int k = 0; k < 3; ++k) {
            const double x0 = std::floor(6.0 * u(rng)), y0 = std::floor(6.0 * u(rng));
            c.fp.blocks.push_back({"b" + std::to_string(l) + "_" + std::to_string(k),
                                   {x0, y0, x0 + 1.0 + std::floor(2.0 * u(rng)), y0 + 1.0 + std::floor(2.0 * u(rng))},
                                   static_cast<int>(l),
                                   BlockKind::functional});
        }
    return c;
}

/// Two-layer strip with `pairs` functional blocks f<i> on layer 0 and a
/// noise generator g<i> directly above each on layer 1. 2x2 cells per block.
inline RandomChip pair_chip(std::size_t pairs) {
    RandomChip c;
    c.stack.die_width = 2.0 * static_cast<double>(pairs);
    c.stack.die_height = 2.0;
    c.stack.ambient_temperature = 40.0;
    c.stack.boundary_resistance_bottom = 1e-5;
    c.stack.boundary_resistance_top = 1e-3;
    c.stack.layers = {{2e-5, 150.0, 1.75e6, 0.0}, {2e-5, 150.0, 1.75e6, 0.0}};
    c.grid = {2, 2 * pairs, kDefaultCellBudget};
    for (std::size_t i = 0; i < pairs; ++i) {
        const double x0 = 2.0 * static_cast<double>(i);
        c.fp.blocks.push_back({"f" + std::to_string(i), {x0, 0, x0 + 2, 2}, 0, BlockKind::functional});
        c.fp.blocks.push_back({"g" + std::to_string(i), {x0, 0, x0 + 2, 2}, 1, BlockKind::noise_generator});
    }
    return c;
}

}  // namespace tscs::test

#pragma once

// Randomized checks shared by the property tests and the acceptance runner.

#include <tscs/controller.hpp>
#include <tscs/shield.hpp>
#include <tscs/thermal.hpp>

#include "support.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace tscs::test {

/// Relative mismatch of the discrete energy identity over a random run:
/// sum C (theta_end - theta_0) = dt * sum_n (sum P - g_amb . theta_{n+1}).
inline double energy_balance_error(std::mt19937_64& rng, std::size_t rows = 8, std::size_t cols = 8) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const RandomChip chip = random_chip(rng, 3, rows, cols);
    const ThermalNetwork net = build_network(chip.fp, chip.stack, chip.grid);
    const double dt = 1e-4 * (0.5 + u(rng));
    const TransientSolver solver(net, dt);
    const auto n = static_cast<Eigen::Index>(net.num_cells());
    Eigen::VectorXd theta(n);
    for (Eigen::Index i = 0; i < n; ++i) theta[i] = 5.0 * u(rng);
    const Eigen::VectorXd start = theta;
    double injected = 0.0, lost = 0.0;
    for (int step = 0; step < 50; ++step) {
        Eigen::VectorXd p(n);
        for (Eigen::Index i = 0; i < n; ++i) p[i] = u(rng) < 0.3 ? 0.0 : 0.05 * u(rng);
        solver.advance(theta, p, 1);
        injected += dt * p.sum();
        lost += dt * net.ambient_conductance().dot(theta);
    }
    const double stored = net.capacitance().dot(theta - start);
    const double scale = std::max({std::abs(stored), injected, std::abs(lost)});
    return std::abs(stored - (injected - lost)) / scale;
}

/// ||G theta - P|| / ||P|| for a random chip and random power.
inline double steady_residual(std::mt19937_64& rng, std::size_t rows = 8, std::size_t cols = 8) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const RandomChip chip = random_chip(rng, 3, rows, cols);
    const ThermalNetwork net = build_network(chip.fp, chip.stack, chip.grid);
    const auto n = static_cast<Eigen::Index>(net.num_cells());
    Eigen::VectorXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) p[i] = u(rng);
    const ThermalState s = steady_state(net, p);
    const Eigen::VectorXd theta = s.temperatures.array() - net.ambient();
    return (net.conductance() * theta - p).norm() / p.norm();
}

struct FuzzOutcome {
    std::vector<std::string> violations;
    bool infeasible = false;
    bool throttled = false;
};

/// One closed-loop episode on a small random two-layer network with a random
/// controller configuration. Checks the controller invariants.
inline FuzzOutcome fuzz_episode(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(u(rng) * static_cast<double>(hi - lo + 1)) % (hi - lo + 1);
    };
    const std::size_t np = pick(1, 3);
    RandomChip chip = pair_chip(np);
    for (auto& l : chip.stack.layers) {
        l.thickness *= 0.5 + 2.0 * u(rng);
        l.conductivity *= 0.5 + u(rng);
    }
    chip.grid.rows = pick(1, 3);
    chip.grid.cols = np * pick(1, 3);
    const ThermalNetwork net = build_network(chip.fp, chip.stack, chip.grid);

    std::vector<std::string> blocks, gens;
    std::vector<ShieldPair> pairs;
    for (std::size_t i = 0; i < np; ++i) {
        blocks.push_back("f" + std::to_string(i));
        gens.push_back("g" + std::to_string(i));
        pairs.push_back({blocks.back(), gens.back()});
    }
    const std::size_t n = pick(40, 120);
    const std::size_t period = pick(2, 30);
    std::vector<double> pw;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t b = 0; b < np; ++b)
            pw.push_back((i / period) % 2 == 0 ? 3.0 * u(rng) : 0.2 * u(rng));
    const Trace power(2e-3, blocks, pw, Unit::watts);

    ShieldSetup s;
    s.network = &net;
    s.dt = 5e-4;
    s.workload_power = power;
    s.pairs = pairs;
    s.p_tables = calibrate_p_table(net, gens, blocks, {0.0, 0.5, 1.0, 2.0});
    s.config.security_level = static_cast<int>(pick(0, 9));
    s.config.adjustment_interval = pick(1, 30);
    s.config.range_window = pick(1, 200);
    s.config.mode = u(rng) < 0.5 ? ControlMode::proportional : ControlMode::pid;
    s.config.kp = 2.0 * u(rng);
    s.config.ki = s.config.mode == ControlMode::pid ? 0.5 * u(rng) : 0.0;
    s.config.kd = s.config.mode == ControlMode::pid ? 0.5 * u(rng) : 0.0;
    s.config.power_budget = u(rng) < 0.15 ? 0.0 : 3.0 * u(rng);
    const ThermalState init = mean_power_state(net, power);
    const double peak = init.temperatures.maxCoeff();
    s.config.thermal_limit = u(rng) < 0.4 ? peak + 2.0 * u(rng) : 125.0;
    s.config.global_range = u(rng) < 0.3;
    s.initial = init;
    if (u(rng) < 0.3) {
        std::vector<double> inc;
        for (std::size_t k = 0, m = pick(1, 6); k < m; ++k) inc.push_back(6.0 * u(rng));
        s.t_table = TTable(inc);
    }

    FuzzOutcome out;
    const RunResult r = run_shielded(s);
    out.infeasible = r.infeasible_samples > 0;
    out.throttled = r.throttled_samples > 0;
    const double budget = s.config.power_budget;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t b = 0; b < np; ++b) {
            const double g = r.generator_power.at(i, b);
            const std::string at = " at sample " + std::to_string(i);
            if (g < 0.0) out.violations.push_back("negative generator power" + at);
            if (g > budget + 1e-12 && !out.infeasible) out.violations.push_back("budget exceeded" + at);
            if (g > r.unthrottled_power.at(i, b)) out.violations.push_back("throttled power above unthrottled" + at);
            const double th = r.thresholds.at(i, b);
            if (th < r.range_min.at(i, b) - 1e-12 || th > r.range_max.at(i, b) + 1e-12)
                out.violations.push_back("threshold outside range" + at);
        }

    ShieldSetup off = s;
    off.config.power_budget = 0.0;
    const RunResult z = run_shielded(off);
    if (z.cells.values() != transient(net, power, init, s.dt).values())
        out.violations.push_back("zero-budget run differs from plain transient");
    return out;
}

}  // namespace tscs::test

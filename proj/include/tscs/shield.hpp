#pragma once

// Closed-loop simulation of the shielding controller against a workload, and
// the max_avg baseline that pins every protected block at its peak.

#include <tscs/controller.hpp>
#include <tscs/thermal.hpp>

#include <Eigen/Dense>

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace tscs {

/// A protected functional block and the noise generator placed next to it.
struct ShieldPair {
    std::string block;
    std::string generator;
};

struct ShieldSetup {
    const ThermalNetwork* network = nullptr;
    double dt = 0.0;  ///< 0 = sample_interval / 10
    Trace workload_power;
    std::vector<ShieldPair> pairs;
    ControllerConfig config;
    TTable t_table = TTable::default_table();
    std::map<std::string, PTable> p_tables;  ///< keyed by protected block
    std::optional<ThermalState> initial;     ///< default: steady state of mean workload power
    std::map<std::string, double> kp_by_block;  ///< overrides config.kp per protected block
};

struct RunResult {
    Trace cells;            ///< degC per cell, row n = end of sample n
    Trace generator_power;  ///< W per generator
    Trace total_power;      ///< W, workload + generators
    Trace thresholds;       ///< T_th per protected block (degC)
    Trace levels;           ///< achieved security level per protected block
    Trace range_min;        ///< T_min the threshold was chosen against (degC)
    Trace range_max;        ///< T_max likewise
    Trace unthrottled_power;  ///< command before any throttling reduction (W)
    std::size_t infeasible_samples = 0;
    std::size_t throttled_samples = 0;
};

namespace detail {

inline double resolve_dt(double dt, double interval) { return dt > 0.0 ? dt : interval / 10.0; }

inline std::vector<std::string> generator_names(const std::vector<ShieldPair>& pairs) {
    std::vector<std::string> out;
    for (const auto& p : pairs) out.push_back(p.generator);
    return out;
}

inline std::vector<std::string> block_names(const std::vector<ShieldPair>& pairs) {
    std::vector<std::string> out;
    for (const auto& p : pairs) out.push_back(p.block);
    return out;
}

inline Trace total_power_trace(const Trace& workload, const std::vector<double>& gen_rows,
                               std::size_t n_gen) {
    std::vector<double> v(workload.num_samples(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (double x : workload.row(i)) v[i] += x;
        for (std::size_t g = 0; g < n_gen; ++g) v[i] += gen_rows[i * n_gen + g];
    }
    return Trace(workload.sample_interval(), {"total"}, std::move(v), Unit::watts);
}

}  // namespace detail

/// Runs the controller sample by sample:
/// sense -> estimate T_block -> update range -> select threshold ->
/// command generator -> one sample of backward-Euler integration.
/// If any cell ends a sample above the thermal limit, the requested level is
/// lowered by one for the next adjustment interval; a throttled command is
/// never larger than the unthrottled one.
inline RunResult run_shielded(const ShieldSetup& s) {
    if (s.network == nullptr) throw ValidationError("run_shielded: no network");
    if (s.workload_power.unit() != Unit::watts)
        throw ValidationError("run_shielded needs a workload power trace");
    s.config.validate();
    const ThermalNetwork& net = *s.network;
    const double interval = s.workload_power.sample_interval();
    const double dt = detail::resolve_dt(s.dt, interval);
    const std::size_t steps = substeps_per_sample(interval, dt);
    const TransientSolver solver(net, dt);
    const PowerMapper mapper(net, s.workload_power.channels());
    const std::size_t nb = s.pairs.size();

    std::vector<const BlockCells*> block_cells, gen_cells;
    std::vector<const PTable*> tables;
    std::vector<ControllerConfig> configs(nb, s.config);
    for (std::size_t b = 0; b < nb; ++b) {
        const auto& p = s.pairs[b];
        if (auto k = s.kp_by_block.find(p.block); k != s.kp_by_block.end()) configs[b].kp = k->second;
        configs[b].validate();
        block_cells.push_back(&net.cells_of(p.block));
        gen_cells.push_back(&net.cells_of(p.generator));
        auto it = s.p_tables.find(p.block);
        if (it == s.p_tables.end())
            throw ValidationError("no p_table for protected block '" + p.block + "'");
        tables.push_back(&it->second);
    }

    const ThermalState init = s.initial ? *s.initial : [&] {
        std::vector<double> mean(s.workload_power.num_channels(), 0.0);
        for (std::size_t i = 0; i < s.workload_power.num_samples(); ++i)
            for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += s.workload_power.at(i, c);
        for (double& m : mean) m /= static_cast<double>(std::max<std::size_t>(1, s.workload_power.num_samples()));
        return steady_state(net, mapper.map(mean));
    }();
    if (init.temperatures.size() != static_cast<Eigen::Index>(net.num_cells()))
        throw ValidationError("initial state does not match the network");

    Eigen::VectorXd theta = init.temperatures.array() - net.ambient();
    std::vector<ControllerState> states(nb);
    ControllerState shadow;  // PID memory for the throttled comparison
    std::vector<double> t_blocks(nb);

    const std::size_t n = s.workload_power.num_samples();
    std::vector<double> cells_out, gen_out, th_out, lvl_out, lo_out, hi_out, full_out;
    cells_out.reserve(n * net.num_cells());
    gen_out.reserve(n * nb);
    RunResult res;
    std::size_t throttle_left = 0;

    for (std::size_t i = 0; i < n; ++i) {
        // 1-2: sense and update ranges
        for (std::size_t b = 0; b < nb; ++b) {
            double t_sensor = net.ambient();
            for (std::size_t k = 0; k < block_cells[b]->cells.size(); ++k)
                t_sensor += block_cells[b]->weights[k] *
                            theta[static_cast<Eigen::Index>(block_cells[b]->cells[k])];
            const BlockEstimate est = estimate_block_temp(t_sensor, states[b].last_command, *tables[b]);
            update_range(states[b], est.t_block, s.config);
            t_blocks[b] = est.t_block;
        }
        double g_min = std::numeric_limits<double>::infinity();
        double g_max = -std::numeric_limits<double>::infinity();
        for (const auto& st : states) {
            g_min = std::min(g_min, st.t_min);
            g_max = std::max(g_max, st.t_max);
        }

        const bool throttled = throttle_left > 0;
        if (throttled) {
            --throttle_left;
            ++res.throttled_samples;
        }
        const int level = s.config.security_level;
        Eigen::VectorXd power = mapper.map(s.workload_power.row(i));
        bool any_infeasible = false;
        for (std::size_t b = 0; b < nb; ++b) {
            const double t_block = t_blocks[b];
            const double lo = s.config.global_range ? g_min : states[b].t_min;
            const double hi = s.config.global_range ? g_max : states[b].t_max;
            // 3-11: threshold and cap
            const ThresholdChoice full = select_threshold(lo, hi, s.config, s.t_table, *tables[b], level);
            const bool reduce = throttled && level > 0;
            if (reduce) {
                shadow.integral = states[b].integral;
                shadow.last_error = states[b].last_error;
            }
            double cmd = generator_command(full.t_th, t_block, full.p_cap, configs[b], states[b]);
            full_out.push_back(cmd);
            ThresholdChoice used = full;
            if (reduce) {
                const ThresholdChoice red =
                    select_threshold(lo, hi, s.config, s.t_table, *tables[b], level - 1);
                const double cmd_red = generator_command(red.t_th, t_block, red.p_cap, configs[b], shadow);
                if (cmd_red < cmd) {
                    cmd = cmd_red;
                    used = red;
                    states[b].integral = shadow.integral;
                    states[b].last_error = shadow.last_error;
                }
                states[b].last_command = cmd;
            }
            states[b].t_th = used.t_th;
            any_infeasible = any_infeasible || used.infeasible;
            gen_out.push_back(cmd);
            th_out.push_back(used.t_th);
            lo_out.push_back(lo);
            hi_out.push_back(hi);
            lvl_out.push_back(static_cast<double>(used.achieved_level));
            add_block_power(power, *gen_cells[b], cmd);
        }
        if (any_infeasible) ++res.infeasible_samples;

        solver.advance(theta, power, steps);
        bool hot = false;
        for (Eigen::Index c = 0; c < theta.size(); ++c) {
            const double t = theta[c] + net.ambient();
            cells_out.push_back(t);
            hot = hot || t > s.config.thermal_limit;
        }
        if (hot) throttle_left = s.config.adjustment_interval;
    }

    const auto gens = detail::generator_names(s.pairs);
    res.cells = Trace(interval, net.cell_names(), std::move(cells_out), Unit::celsius);
    res.total_power = detail::total_power_trace(s.workload_power, gen_out, nb);
    res.generator_power = Trace(interval, gens, gen_out, Unit::watts);
    res.thresholds = Trace(interval, detail::block_names(s.pairs), std::move(th_out), Unit::celsius);
    res.levels = Trace(interval, detail::block_names(s.pairs), std::move(lvl_out), Unit::instructions);
    res.range_min = Trace(interval, detail::block_names(s.pairs), std::move(lo_out), Unit::celsius);
    res.range_max = Trace(interval, detail::block_names(s.pairs), std::move(hi_out), Unit::celsius);
    res.unthrottled_power = Trace(interval, gens, std::move(full_out), Unit::watts);
    return res;
}

struct MaxAvgOptions {
    std::size_t max_iterations = 40;
    double tolerance = 1e-3;  ///< degC of peak overshoot accepted
    double relaxation = 2.0;  ///< target step as a multiple of the overshoot
};

struct MaxAvgResult {
    RunResult run;
    std::vector<double> targets;  ///< final hold temperature per protected block
    std::size_t iterations = 0;
};

namespace detail {

/// Nonnegative least squares for a small square system (Lawson-Hanson).
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const Eigen::Index n = a.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    for (int outer = 0; outer < 3 * n + 3; ++outer) {
        const Eigen::VectorXd w = a.transpose() * (b - a * x);
        Eigen::Index best = -1;
        double wmax = 1e-14;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!passive[static_cast<std::size_t>(j)] && w[j] > wmax) {
                wmax = w[j];
                best = j;
            }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;
        for (int inner = 0; inner < 3 * n + 3; ++inner) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
            Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
            const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
            Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
            for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[static_cast<Eigen::Index>(k)];
            bool ok = true;
            for (Eigen::Index j : idx)
                if (z[j] <= 0.0) ok = false;
            if (ok) {
                x = z;
                break;
            }
            double alpha = 1.0;
            for (Eigen::Index j : idx)
                if (z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
            x += alpha * (z - x);
            for (Eigen::Index j : idx)
                if (x[j] <= 1e-15) {
                    x[j] = 0.0;
                    passive[static_cast<std::size_t>(j)] = false;
                }
        }
    }
    return x;
}

}  // namespace detail

/// max_avg baseline, closed loop. Each protected block is held at a target
/// temperature by choosing, every sample, the nonnegative generator powers
/// whose one-sample response lands the block temperatures on their targets
/// (the open-loop max_avg_injection command plus exact feedback). Targets
/// start at the unshielded per-block peaks and are raised to any overshoot
/// the nonnegative powers could not prevent, until the held trace is flat.
inline MaxAvgResult run_max_avg(const ThermalNetwork& net, const Trace& workload_power,
                                const std::vector<ShieldPair>& pairs,
                                const std::optional<ThermalState>& initial = std::nullopt,
                                double dt = 0.0, const MaxAvgOptions& opt = {}) {
    const double interval = workload_power.sample_interval();
    dt = detail::resolve_dt(dt, interval);
    const std::size_t steps = substeps_per_sample(interval, dt);
    const TransientSolver solver(net, dt);
    const PowerMapper mapper(net, workload_power.channels());
    const std::size_t nb = pairs.size();
    const std::size_t n = workload_power.num_samples();
    const auto ncell = static_cast<Eigen::Index>(net.num_cells());

    std::vector<const BlockCells*> bcells;
    for (const auto& p : pairs) bcells.push_back(&net.cells_of(p.block));
    auto block_temps = [&](const Eigen::VectorXd& th) {
        Eigen::VectorXd t(static_cast<Eigen::Index>(nb));
        for (std::size_t b = 0; b < nb; ++b) t[static_cast<Eigen::Index>(b)] = block_temperature(th, *bcells[b]);
        return t;
    };

    // One-sample response of the field to 1 W on each generator, from rest.
    Eigen::MatrixXd unit(ncell, static_cast<Eigen::Index>(nb));
    Eigen::MatrixXd resp(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
    for (std::size_t g = 0; g < nb; ++g) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(ncell);
        add_block_power(p, net.cells_of(pairs[g].generator), 1.0);
        Eigen::VectorXd th = Eigen::VectorXd::Zero(ncell);
        solver.advance(th, p, steps);
        unit.col(static_cast<Eigen::Index>(g)) = th;
        resp.col(static_cast<Eigen::Index>(g)) = block_temps(th);
    }

    const ThermalState init = initial ? *initial : mean_power_state(net, workload_power);
    const Trace unshielded = transient(net, workload_power, init, dt);
    std::vector<double> target(nb, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t b = 0; b < nb; ++b)
            target[b] = std::max(target[b], block_temperature(
                Eigen::Map<const Eigen::VectorXd>(unshielded.row(i).data(), ncell), *bcells[b]));

    MaxAvgResult out;
    for (std::size_t iter = 1;; ++iter) {
        Eigen::VectorXd theta = init.temperatures.array() - net.ambient();
        std::vector<double> cells_out, gen_out;
        cells_out.reserve(n * net.num_cells());
        gen_out.reserve(n * nb);
        std::vector<double> peak(nb, -std::numeric_limits<double>::infinity());
        Eigen::VectorXd goal(static_cast<Eigen::Index>(nb));
        for (std::size_t b = 0; b < nb; ++b) goal[static_cast<Eigen::Index>(b)] = target[b] - net.ambient();
        for (std::size_t i = 0; i < n; ++i) {
            solver.advance(theta, mapper.map(workload_power.row(i)), steps);
            const Eigen::VectorXd free = block_temps(theta);
            const Eigen::VectorXd cmd = detail::nnls(resp, goal - free);
            theta += unit * cmd;
            for (std::size_t b = 0; b < nb; ++b) {
                gen_out.push_back(cmd[static_cast<Eigen::Index>(b)]);
                peak[b] = std::max(peak[b], block_temperature(theta, *bcells[b]) + net.ambient());
            }
            for (Eigen::Index c = 0; c < ncell; ++c) cells_out.push_back(theta[c] + net.ambient());
        }
        bool flat = true;
        for (std::size_t b = 0; b < nb; ++b)
            if (peak[b] > target[b] + opt.tolerance) {
                flat = false;
                target[b] += opt.relaxation * (peak[b] - target[b]);
            }
        if (flat || iter >= opt.max_iterations) {
            RunResult& r = out.run;
            r.cells = Trace(interval, net.cell_names(), std::move(cells_out), Unit::celsius);
            r.total_power = detail::total_power_trace(workload_power, gen_out, nb);
            r.generator_power = Trace(interval, detail::generator_names(pairs), std::move(gen_out), Unit::watts);
            std::vector<double> th;
            for (std::size_t i = 0; i < n; ++i) th.insert(th.end(), target.begin(), target.end());
            r.thresholds = Trace(interval, detail::block_names(pairs), std::move(th), Unit::celsius);
            r.levels = Trace(interval, detail::block_names(pairs),
                             std::vector<double>(n * nb, 0.0), Unit::instructions);
            out.targets = target;
            out.iterations = iter;
            return out;
        }
    }
}

}  // namespace tscs

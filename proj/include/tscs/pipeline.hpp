#pragma once

// Scenario evaluation: unshielded baseline, shielded runs over a set of
// increments or levels, max_avg, and the per-run metrics rows
// `benchmark,setting,svf,abs_svf,scaled_svf,mpu,power_overhead,stsf,m_eff`.

#include <tscs/controller.hpp>
#include <tscs/csv.hpp>
#include <tscs/metrics.hpp>
#include <tscs/scenario.hpp>
#include <tscs/sensors.hpp>
#include <tscs/shield.hpp>
#include <tscs/thermal.hpp>
#include <tscs/workload.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tscs {

inline const std::vector<std::string> kSummaryHeader{"benchmark", "setting", "svf", "abs_svf", "scaled_svf",
                                                     "mpu", "power_overhead", "stsf", "m_eff"};

/// Stable 64-bit FNV-1a, used to derive per-benchmark noise seeds.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Network and calibrated coupling tables shared by every run of a scenario.
struct Prepared {
    ThermalNetwork net;
    std::map<std::string, PTable> p_tables;
    std::map<std::string, double> kp;  ///< per protected block
};

inline Prepared prepare(const Scenario& sc) {
    Prepared p{build_network(sc.floorplan, sc.stack, sc.grid), {}, {}};
    if (sc.pairs.empty()) return p;
    std::vector<std::string> gens;
    for (const auto& pr : sc.pairs) gens.push_back(pr.generator);
    if (sc.p_table_dir) {
        for (const auto& pr : sc.pairs) {
            const auto path = *sc.p_table_dir / ("p_table_" + pr.block + ".csv");
            if (!std::filesystem::exists(path)) throw ValidationError("p_table not found: " + path.string());
            p.p_tables.emplace(pr.block, PTable::from_table(load_table(path, {"delta_t_c", "power_w"}), path.string()));
        }
    } else {
        p.p_tables = calibrate_p_table(p.net, gens, sc.protected_blocks(), sc.calibration_powers);
    }
    for (const auto& pr : sc.pairs)
        p.kp[pr.block] = sc.kp_auto ? p.p_tables.at(pr.block).slope() : sc.controller.kp;
    return p;
}

inline TTable scenario_t_table(const Scenario& sc) {
    if (!sc.t_table_path) return TTable::default_table();
    return TTable::from_table(load_table(*sc.t_table_path, {"level", "delta_t_c"}), sc.t_table_path->string());
}

/// Block-level watts: the power model applied to every instruction channel.
inline Trace workload_power(const Scenario& sc, const Trace& inst) { return to_power(inst, sc.power_model); }

/// Attacker view used by the metrics: one builtin sensor per protected block,
/// with the scenario's observer noise and quantization.
inline Trace observe_blocks(const Trace& cells, const ThermalNetwork& net, const std::vector<std::string>& blocks,
                            const ObserverConfig& obs, std::uint64_t seed) {
    std::vector<std::string> channels;
    std::vector<Trace> parts;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        SensorConfig cfg;
        cfg.id = blocks[b];
        cfg.mode = SensorMode::builtin;
        cfg.region = region_of_blocks(net, {blocks[b]});
        cfg.noise_std = obs.noise_std;
        cfg.quantization = obs.quantization;
        parts.push_back(observe(cells, cfg, net, seed + 7919 * b));
        channels.push_back(blocks[b]);
    }
    const std::size_t n = cells.num_samples();
    std::vector<double> v;
    v.reserve(n * blocks.size());
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& p : parts) v.push_back(p.at(i, 0));
    return Trace(cells.sample_interval(), std::move(channels), std::move(v), Unit::celsius);
}

struct SettingResult {
    std::string setting;
    std::optional<RunResult> run;  ///< absent for the unshielded baseline
    Trace observed;
    SvfReport svf;
    double mpu = 0.0;
    double power_overhead = 0.0;
    double stsf = 0.0;
    std::size_t m_eff = 0;
    std::vector<double> mean_block_temps;
};

struct BenchmarkResult {
    std::string name;
    Trace inst;            ///< protected channels only
    Trace cells;           ///< unshielded cell temperatures
    std::size_t delay_k = 0;
    std::vector<SettingResult> settings;

    const SettingResult& at(std::string_view setting) const {
        for (const auto& s : settings)
            if (s.setting == setting) return s;
        throw ValidationError("no setting '" + std::string(setting) + "' for " + name);
    }
};

/// What to run for each benchmark.
struct EvalPlan {
    std::vector<double> delta_ts;            ///< shield_<dT> runs, level 0 of a one-entry table
    std::vector<int> levels;                 ///< shield_L<n> runs against the scenario T table
    bool global = false;                     ///< shield_global: max dT with a shared range
    bool max_avg = false;                    ///< emit the max_avg row (always computed for MPU)
};

inline std::string delta_setting(double dt) { return "shield_" + format_double(dt); }
inline std::string level_setting(int level) { return "shield_L" + std::to_string(level); }

namespace detail {

inline void finish_metrics(SettingResult& r, const Trace& inst, std::size_t k, const MetricConfig& m) {
    r.svf = svf_trace(inst, r.observed, k, m.svf);
    const std::size_t n = r.observed.num_samples();
    r.mean_block_temps.assign(r.observed.num_channels(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < r.mean_block_temps.size(); ++c) r.mean_block_temps[c] += r.observed.at(i, c);
    for (double& t : r.mean_block_temps) t /= static_cast<double>(std::max<std::size_t>(1, n));
    r.m_eff = effective_groups(r.mean_block_temps, m.stsf_epsilon);
    r.stsf = stsf(r.mean_block_temps.size(), r.m_eff).stsf;
}

}  // namespace detail

inline BenchmarkResult evaluate_benchmark(const Scenario& sc, const Prepared& prep, const BenchmarkInput& bench,
                                          const EvalPlan& plan) {
    const auto blocks = sc.protected_blocks();
    if (blocks.empty()) throw ValidationError("scenario has no protected blocks");
    BenchmarkResult out;
    out.name = bench.name;
    out.inst = bench.inst.select(blocks);
    const Trace power = workload_power(sc, bench.inst);
    const ThermalState init = mean_power_state(prep.net, power);
    const std::uint64_t seed = sc.seed + fnv1a(bench.name);
    const double dt = sc.dt > 0.0 ? sc.dt : power.sample_interval() / 10.0;

    out.cells = transient(prep.net, power, init, dt);
    SettingResult base;
    base.setting = "unshielded";
    base.observed = observe_blocks(out.cells, prep.net, blocks, sc.observer, seed);
    out.delay_k = best_delay(out.inst, base.observed, sc.metrics.k_max, sc.metrics.svf).delay_k;
    detail::finish_metrics(base, out.inst, out.delay_k, sc.metrics);
    out.settings.push_back(std::move(base));

    const MaxAvgResult ma = run_max_avg(prep.net, power, sc.pairs, init, dt);

    auto shielded = [&](std::string name, const TTable& table, int level, bool global) {
        ShieldSetup s;
        s.network = &prep.net;
        s.dt = dt;
        s.workload_power = power;
        s.pairs = sc.pairs;
        s.config = sc.controller;
        s.config.security_level = level;
        s.config.global_range = global;
        s.t_table = table;
        s.p_tables = prep.p_tables;
        s.kp_by_block = prep.kp;
        s.initial = init;
        SettingResult r;
        r.setting = std::move(name);
        r.run = run_shielded(s);
        r.observed = observe_blocks(r.run->cells, prep.net, blocks, sc.observer, seed);
        r.mpu = mpu(r.run->generator_power, ma.run.generator_power);
        r.power_overhead = tscs::power_overhead(r.run->generator_power, r.run->total_power);
        detail::finish_metrics(r, out.inst, out.delay_k, sc.metrics);
        out.settings.push_back(std::move(r));
    };

    for (double d : plan.delta_ts) shielded(delta_setting(d), TTable({d}), 0, sc.controller.global_range);
    if (!plan.levels.empty()) {
        const TTable table = scenario_t_table(sc);
        for (int l : plan.levels) shielded(level_setting(l), table, l, sc.controller.global_range);
    }
    if (plan.global) {
        double top = 0.0;
        for (double d : sc.sweep) top = std::max(top, d);
        shielded("shield_global", TTable({top}), 0, true);
    }
    if (plan.max_avg) {
        SettingResult r;
        r.setting = "max_avg";
        r.run = ma.run;
        r.observed = observe_blocks(ma.run.cells, prep.net, blocks, sc.observer, seed);
        r.mpu = 1.0;
        r.power_overhead = tscs::power_overhead(ma.run.generator_power, ma.run.total_power);
        detail::finish_metrics(r, out.inst, out.delay_k, sc.metrics);
        out.settings.push_back(std::move(r));
    }
    return out;
}

inline std::vector<std::string> summary_row(const std::string& bench, const SettingResult& r) {
    return {bench,
            r.setting,
            format_double(r.svf.svf),
            format_double(r.svf.abs_svf),
            format_double(scaled_svf(r.svf.svf, r.mpu)),
            format_double(r.mpu),
            format_double(r.power_overhead),
            format_double(r.stsf),
            std::to_string(r.m_eff)};
}

/// Per-run rows followed by one `g_mean` row per setting: geometric mean of
/// |svf| and |scaled_svf|, arithmetic mean of the other columns.
inline Table summary_table(const std::vector<BenchmarkResult>& results) {
    Table t;
    t.header = kSummaryHeader;
    std::vector<std::string> order;
    std::map<std::string, std::vector<const SettingResult*>> by_setting;
    for (const auto& b : results)
        for (const auto& s : b.settings) {
            t.rows.push_back(summary_row(b.name, s));
            if (!by_setting.count(s.setting)) order.push_back(s.setting);
            by_setting[s.setting].push_back(&s);
        }
    if (results.size() < 2) return t;
    for (const auto& name : order) {
        const auto& rs = by_setting[name];
        std::vector<double> sv, sc;
        double mp = 0, ov = 0, st = 0, me = 0;
        for (const auto* r : rs) {
            sv.push_back(r->svf.svf);
            sc.push_back(scaled_svf(r->svf.svf, r->mpu));
            mp += r->mpu;
            ov += r->power_overhead;
            st += r->stsf;
            me += static_cast<double>(r->m_eff);
        }
        const double n = static_cast<double>(rs.size());
        const double g = geometric_mean_abs(sv);
        t.rows.push_back({"g_mean", name, format_double(g), format_double(g),
                          format_double(geometric_mean_abs(sc)), format_double(mp / n), format_double(ov / n),
                          format_double(st / n), format_double(me / n)});
    }
    return t;
}

}  // namespace tscs

#pragma once

// The command implementations behind tools/tscs_cli. Each writes its
// artifacts under an output directory through atomic_write and returns
// nothing; failures surface as ValidationError or RuntimeError.

#include <tscs/pipeline.hpp>
#include <tscs/report.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

namespace tscs {

namespace fs = std::filesystem;

/// Runs f(0..n-1) on a small thread pool. Every call must be independent;
/// results are collected by index, so output order never depends on timing.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                    try {
                        f(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::vector<BenchmarkResult> evaluate_suite(const Scenario& sc, const Prepared& prep, const EvalPlan& plan) {
    std::vector<BenchmarkResult> out(sc.benchmarks.size());
    parallel_for(out.size(), [&](std::size_t i) { out[i] = evaluate_benchmark(sc, prep, sc.benchmarks[i], plan); });
    return out;
}

// ---------------------------------------------------------------- simulate

inline void cmd_simulate(const Scenario& sc, const fs::path& out) {
    const ThermalNetwork net = build_network(sc.floorplan, sc.stack, sc.grid);
    std::vector<std::string> blocks;
    for (const auto& b : sc.floorplan.blocks) blocks.push_back(b.id);
    parallel_for(sc.benchmarks.size(), [&](std::size_t i) {
        const auto& b = sc.benchmarks[i];
        const Trace power = workload_power(sc, b.inst);
        const double dt = sc.dt > 0.0 ? sc.dt : power.sample_interval() / 10.0;
        const Trace cells = transient(net, power, mean_power_state(net, power), dt);
        write_trace_csv(out / b.name / "cells.csv", cells);
        write_trace_csv(out / b.name / "blocks.csv", block_temperatures(cells, blocks, net));
    });
}

// --------------------------------------------------------------- calibrate

inline void write_table(const fs::path& path, const Table& t) { atomic_write(path, t.to_csv()); }

inline void cmd_calibrate(const Scenario& sc, const fs::path& out) {
    if (sc.pairs.empty()) throw ValidationError("calibrate needs shield pairs in the scenario");
    Scenario fresh = sc;
    fresh.p_table_dir.reset();
    const Prepared prep = prepare(fresh);
    for (const auto& [block, table] : prep.p_tables) write_table(out / ("p_table_" + block + ".csv"), table.to_table());

    const auto results = evaluate_suite(fresh, prep, EvalPlan{sc.sweep, {}, false, false});
    Table sweep{{"benchmark", "delta_t_c", "svf", "abs_svf", "scaled_svf", "mpu"}, {}};
    std::map<double, std::vector<double>> by_inc;
    std::vector<double> base;
    for (const auto& r : results) {
        const auto& u = r.at("unshielded");
        base.push_back(u.svf.svf);
        sweep.rows.push_back({r.name, "0", format_double(u.svf.svf), format_double(u.svf.abs_svf), "0", "0"});
        for (double d : sc.sweep) {
            const auto& s = r.at(delta_setting(d));
            by_inc[d].push_back(s.svf.svf);
            sweep.rows.push_back({r.name, format_double(d), format_double(s.svf.svf), format_double(s.svf.abs_svf),
                                  format_double(scaled_svf(s.svf.svf, s.mpu)), format_double(s.mpu)});
        }
    }
    std::map<double, double> g;
    const double g0 = geometric_mean_abs(base);
    sweep.rows.push_back({"g_mean", "0", format_double(g0), format_double(g0), "0", "0"});
    for (const auto& [d, v] : by_inc) {
        g[d] = geometric_mean_abs(v);
        sweep.rows.push_back({"g_mean", format_double(d), format_double(g[d]), format_double(g[d]), "", ""});
    }
    write_table(out / "svf_sweep.csv", sweep);
    const TTable tt = calibrate_t_table(g, g0);
    if (!tt.calibrated()) std::cerr << "warning: no increment beat the unshielded SVF; default t_table written\n";
    write_table(out / "t_table.csv", tt.to_table());
}

// ------------------------------------------------------------------ shield

struct ShieldOptions {
    std::optional<int> security_level;
    bool sweep = false;
    bool max_avg = false;
};

namespace detail {

/// Time-averaged cell temperatures as `setting,layer,row,col,temp_c` rows.
inline void append_heat_rows(Table& t, const std::string& setting, const Trace& cells, const ThermalNetwork& net) {
    const std::size_t n = cells.num_samples();
    for (std::size_t l = 0; l < net.num_layers(); ++l)
        for (std::size_t r = 0; r < net.rows(); ++r)
            for (std::size_t c = 0; c < net.cols(); ++c) {
                const std::size_t idx = net.cell_index(l, r, c);
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += cells.at(i, idx);
                t.rows.push_back({setting, std::to_string(l), std::to_string(r), std::to_string(c),
                                  format_double(s / static_cast<double>(std::max<std::size_t>(1, n)))});
            }
}

/// The same closed loop with a zero budget: generators present but idle.
inline Trace shield_off_cells(const Scenario& sc, const Prepared& prep, const BenchmarkInput& b) {
    const Trace power = workload_power(sc, b.inst);
    ShieldSetup s;
    s.network = &prep.net;
    s.dt = sc.dt;
    s.workload_power = power;
    s.pairs = sc.pairs;
    s.config = sc.controller;
    s.config.power_budget = 0.0;
    s.t_table = TTable({0.0});
    s.config.security_level = 0;
    s.p_tables = prep.p_tables;
    s.kp_by_block = prep.kp;
    s.initial = mean_power_state(prep.net, power);
    return run_shielded(s).cells;
}

}  // namespace detail

inline void cmd_shield(const Scenario& sc, const fs::path& out, const ShieldOptions& opt) {
    if (sc.pairs.empty()) throw ValidationError("shield needs shield pairs in the scenario");
    const Prepared prep = prepare(sc);
    EvalPlan plan;
    plan.max_avg = opt.max_avg;
    if (opt.sweep) {
        plan.delta_ts = sc.sweep;
        plan.global = true;
    }
    if (opt.security_level || !opt.sweep) {
        const int level = opt.security_level.value_or(sc.controller.security_level);
        const TTable table = scenario_t_table(sc);
        if (level < 0 || level > table.max_level())
            throw ValidationError("security level " + std::to_string(level) + " outside t_table (0.." +
                                  std::to_string(table.max_level()) + ")");
        plan.levels = {level};
    }
    const auto results = evaluate_suite(sc, prep, plan);
    parallel_for(results.size(), [&](std::size_t i) {
        const auto& r = results[i];
        const fs::path dir = out / r.name;
        Table heat{{"setting", "layer", "row", "col", "temp_c"}, {}};
        detail::append_heat_rows(heat, "without", r.cells, prep.net);
        detail::append_heat_rows(heat, "off", detail::shield_off_cells(sc, prep, sc.benchmarks[i]), prep.net);
        const SettingResult* on = nullptr;
        for (const auto& s : r.settings) {
            write_trace_csv(dir / s.setting / "observed.csv", s.observed);
            if (s.run) {
                write_trace_csv(dir / s.setting / "generator_power.csv", s.run->generator_power);
                if (s.setting != "max_avg") on = &s;
            }
        }
        if (on) detail::append_heat_rows(heat, "on", on->run->cells, prep.net);
        write_table(dir / "heatmap.csv", heat);
    });
    write_table(out / "summary.csv", summary_table(results));
}

// ----------------------------------------------------------------- analyze

struct AnalyzeOptions {
    std::size_t k_max = 20;
    SvfOptions svf{200, 100, 300};
    double epsilon = 0.1;
    std::vector<std::size_t> m_values{1, 2, 4, 8};
    std::string format = "csv";
};

struct AnalyzeReport {
    SvfReport svf;
    std::vector<double> mean_temps;
    std::size_t m_eff = 0;
    double stsf_eff = 0.0;
    std::vector<std::pair<std::size_t, std::optional<double>>> stsf_at_m;  ///< empty when m does not divide n
};

inline AnalyzeReport analyze(const Trace& inst, const Trace& temp, const AnalyzeOptions& opt) {
    AnalyzeReport a;
    a.svf = best_delay(inst, temp, opt.k_max, opt.svf);
    const std::size_t n = temp.num_channels();
    a.mean_temps.assign(n, 0.0);
    for (std::size_t i = 0; i < temp.num_samples(); ++i)
        for (std::size_t c = 0; c < n; ++c) a.mean_temps[c] += temp.at(i, c);
    for (double& t : a.mean_temps) t /= static_cast<double>(std::max<std::size_t>(1, temp.num_samples()));
    a.m_eff = effective_groups(a.mean_temps, opt.epsilon);
    a.stsf_eff = stsf(n, a.m_eff).stsf;
    for (std::size_t m : opt.m_values) {
        if (m >= 1 && m <= n && n % m == 0) a.stsf_at_m.push_back({m, stsf(n, m).stsf});
        else a.stsf_at_m.push_back({m, std::nullopt});
    }
    return a;
}

inline Table analyze_table(const AnalyzeReport& a) {
    Table t{{"metric", "value"}, {}};
    t.rows.push_back({"delay_k", std::to_string(a.svf.delay_k)});
    t.rows.push_back({"svf", format_double(a.svf.svf)});
    t.rows.push_back({"abs_svf", format_double(a.svf.abs_svf)});
    t.rows.push_back({"num_pairs", std::to_string(a.svf.num_pairs)});
    t.rows.push_back({"m_eff", std::to_string(a.m_eff)});
    t.rows.push_back({"stsf_eff", format_double(a.stsf_eff)});
    for (const auto& [m, v] : a.stsf_at_m)
        t.rows.push_back({"stsf_m" + std::to_string(m), v ? format_double(*v) : "nan"});
    return t;
}

inline std::string analyze_json(const AnalyzeReport& a) {
    nlohmann::ordered_json j;
    j["delay_k"] = a.svf.delay_k;
    j["svf"] = a.svf.svf;
    j["abs_svf"] = a.svf.abs_svf;
    j["num_pairs"] = a.svf.num_pairs;
    j["zero_variance"] = a.svf.zero_variance;
    j["m_eff"] = a.m_eff;
    j["stsf_eff"] = a.stsf_eff;
    auto& s = j["stsf"];
    s = nlohmann::ordered_json::object();
    for (const auto& [m, v] : a.stsf_at_m) s[std::to_string(m)] = v ? nlohmann::ordered_json(*v) : nullptr;
    return j.dump(2) + "\n";
}

/// Writes analysis.csv (and analysis.json for --format json) under `out`
/// when given, and returns the text for stdout.
inline std::string cmd_analyze(const fs::path& inst_csv, const fs::path& temp_csv, const AnalyzeOptions& opt,
                               const std::optional<fs::path>& out) {
    if (opt.format != "csv" && opt.format != "json") throw ValidationError("--format must be csv or json");
    const Trace inst = load_trace(inst_csv, {Unit::instructions, {}}).trace;
    const Trace temp = load_trace(temp_csv, {Unit::celsius, {}}).trace;
    const AnalyzeReport a = analyze(inst, temp, opt);
    const std::string csv = analyze_table(a).to_csv();
    const std::string js = analyze_json(a);
    if (out) {
        atomic_write(*out / "analysis.csv", csv);
        if (opt.format == "json") atomic_write(*out / "analysis.json", js);
    }
    return opt.format == "json" ? js : csv;
}

// ------------------------------------------------------------------ attack

inline void cmd_attack(const Scenario& sc, const fs::path& out, const std::vector<std::string>& sensor_ids) {
    std::vector<SensorConfig> sensors;
    if (sensor_ids.empty()) {
        sensors = sc.sensors;
    } else {
        for (const auto& id : sensor_ids) {
            auto it = std::find_if(sc.sensors.begin(), sc.sensors.end(), [&](const auto& s) { return s.id == id; });
            if (it == sc.sensors.end()) throw ValidationError("unknown sensor '" + id + "'");
            sensors.push_back(*it);
        }
    }
    if (sensors.empty() && !sc.attenuation) throw ValidationError("scenario defines no sensors");
    const ThermalNetwork net = build_network(sc.floorplan, sc.stack, sc.grid);
    auto inst_of = [&](const BenchmarkInput& b) {
        const auto blocks = sc.protected_blocks();
        return blocks.empty() ? b.inst : b.inst.select(blocks);
    };

    std::vector<std::vector<std::vector<std::string>>> rows(sc.benchmarks.size());
    std::vector<std::vector<std::vector<std::string>>> atten(sc.benchmarks.size());
    parallel_for(sc.benchmarks.size(), [&](std::size_t i) {
        const auto& b = sc.benchmarks[i];
        const Trace power = workload_power(sc, b.inst);
        const double dt = sc.dt > 0.0 ? sc.dt : power.sample_interval() / 10.0;
        const Trace inst = inst_of(b);
        if (!sensors.empty()) {
            const Trace cells = transient(net, power, mean_power_state(net, power), dt);
            for (const auto& s : sensors) {
                const Trace obs = observe(cells, s, net, sc.seed + fnv1a(b.name + "/" + s.id));
                write_trace_csv(out / b.name / ("sensor_" + s.id + ".csv"), obs);
                // A resampled sensor is compared against the trace on its own grid.
                const Trace ref = obs.sample_interval() == inst.sample_interval() ? inst
                                                                                : resample(inst, obs.sample_interval());
                const SvfReport r = best_delay(ref, obs, sc.metrics.k_max, sc.metrics.svf);
                rows[i].push_back({b.name, s.id, std::string(to_string(s.mode)), std::to_string(r.delay_k),
                                   format_double(r.svf), format_double(r.abs_svf)});
            }
        }
        if (sc.attenuation) {
            const auto& a = *sc.attenuation;
            AttenuationSetup setup{sc.floorplan, a.stack, sc.grid, a.block, power, b.inst.select({a.block}),
                                   a.sensor, sc.dt, sc.metrics.svf, sc.metrics.k_max,
                                   sc.seed + fnv1a(b.name + "/attenuation")};
            for (const auto& l : layer_attenuation_experiment(setup, a.layers))
                atten[i].push_back({b.name, a.block, std::to_string(l.layer), std::to_string(l.report.delay_k),
                                    format_double(l.report.svf), format_double(l.report.abs_svf)});
        }
    });
    if (!sensors.empty()) {
        Table t{{"benchmark", "sensor", "mode", "delay_k", "svf", "abs_svf"}, {}};
        for (auto& r : rows) t.rows.insert(t.rows.end(), r.begin(), r.end());
        write_table(out / "attack.csv", t);
    }
    if (sc.attenuation) {
        Table t{{"benchmark", "block", "layer", "delay_k", "svf", "abs_svf"}, {}};
        for (auto& r : atten) t.rows.insert(t.rows.end(), r.begin(), r.end());
        write_table(out / "attenuation.csv", t);
    }
}

// ------------------------------------------------------------------ report

namespace detail {

inline BarChart summary_chart(const Table& t, const std::string& title, const std::string& y_label,
                              const std::string& column, bool skip_unshielded, bool percent, bool with_dots) {
    BarChart c;
    c.title = title;
    c.y_label = y_label;
    c.dot_label = "scaled SVF (|SVF| x MPU)";
    const std::size_t bi = t.column("benchmark"), si = t.column("setting"), vi = t.column(column);
    const std::size_t di = t.column("scaled_svf");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (skip_unshielded && row[si] == "unshielded") continue;
        if (std::find(c.groups.begin(), c.groups.end(), row[bi]) == c.groups.end()) c.groups.push_back(row[bi]);
        if (std::find(c.series.begin(), c.series.end(), row[si]) == c.series.end()) c.series.push_back(row[si]);
        double v = table_number(t, r, vi, "summary.csv");
        if (percent) v *= 100.0;
        c.bars[{row[bi], row[si]}] = std::abs(v);
        if (with_dots && row[si] != "unshielded")
            c.dots[{row[bi], row[si]}] = std::abs(table_number(t, r, di, "summary.csv"));
    }
    return c;
}

inline std::vector<HeatPanel> heat_panels(const Table& t) {
    // Show the layer with the widest unshielded spread: that is where the
    // activity pattern is visible.
    std::map<std::size_t, std::pair<double, double>> span;
    std::size_t rows = 0, cols = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto l = static_cast<std::size_t>(table_number(t, r, 1, "heatmap.csv"));
        rows = std::max(rows, static_cast<std::size_t>(table_number(t, r, 2, "heatmap.csv")) + 1);
        cols = std::max(cols, static_cast<std::size_t>(table_number(t, r, 3, "heatmap.csv")) + 1);
        if (t.rows[r][0] != "without") continue;
        const double v = table_number(t, r, 4, "heatmap.csv");
        auto [it, fresh] = span.emplace(l, std::make_pair(v, v));
        it->second.first = std::min(it->second.first, v);
        it->second.second = std::max(it->second.second, v);
    }
    std::size_t layer = 0;
    double best = -1.0;
    for (const auto& [l, mm] : span)
        if (mm.second - mm.first > best) {
            best = mm.second - mm.first;
            layer = l;
        }
    std::vector<HeatPanel> out;
    for (const std::string name : {"without", "off", "on"}) {
        HeatPanel p{(name == "without" ? "without shielding" : "shielding " + name) + ", layer " +
                        std::to_string(layer),
                    rows, cols, std::vector<double>(rows * cols, 0.0)};
        bool any = false;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (t.rows[r][0] != name || static_cast<std::size_t>(table_number(t, r, 1)) != layer) continue;
            const auto rr = static_cast<std::size_t>(table_number(t, r, 2));
            const auto cc = static_cast<std::size_t>(table_number(t, r, 3));
            p.temps[rr * cols + cc] = table_number(t, r, 4);
            any = true;
        }
        if (any) out.push_back(std::move(p));
    }
    return out;
}

}  // namespace detail

/// Aggregates `summary.csv` from each run directory into one table (a `run`
/// column first) and renders the figures for every run.
inline void cmd_report(const std::vector<fs::path>& runs, const fs::path& out) {
    if (runs.empty()) throw ValidationError("report needs at least one run directory");
    Table all;
    all.header = {"run"};
    all.header.insert(all.header.end(), kSummaryHeader.begin(), kSummaryHeader.end());
    std::set<std::string> seen;
    for (const auto& dir : runs) {
        const fs::path summary = dir / "summary.csv";
        if (!fs::exists(summary)) throw ValidationError("missing run artifact: " + summary.string());
        std::string name = fs::path(dir).lexically_normal().filename().string();
        if (name.empty()) name = fs::path(dir).lexically_normal().parent_path().filename().string();
        if (!seen.insert(name).second) throw ValidationError("duplicate run name '" + name + "'");
        const Table t = load_table(summary, kSummaryHeader);
        for (const auto& row : t.rows) {
            std::vector<std::string> r{name};
            r.insert(r.end(), row.begin(), row.end());
            all.rows.push_back(std::move(r));
        }
        const std::string p = name + "_";
        atomic_write(out / (p + "svf.svg"),
                     render_bar_chart(detail::summary_chart(t, name + ": SVF per benchmark", "|SVF|", "abs_svf",
                                                            false, false, true)));
        atomic_write(out / (p + "mpu.svg"), render_bar_chart(detail::summary_chart(
                                                t, name + ": power utilization", "MPU", "mpu", true, false, false)));
        atomic_write(out / (p + "overhead.svg"),
                     render_bar_chart(detail::summary_chart(t, name + ": power overhead", "overhead (%)",
                                                            "power_overhead", true, true, false)));
        for (const auto& e : fs::directory_iterator(dir)) {
            if (!e.is_directory() || !fs::exists(e.path() / "heatmap.csv")) continue;
            const Table h = load_table(e.path() / "heatmap.csv", {"setting", "layer", "row", "col", "temp_c"});
            const std::string bench = e.path().filename().string();
            atomic_write(out / (p + "heatmap_" + bench + ".svg"),
                         render_heatmaps(name + " / " + bench + ": mean temperature", detail::heat_panels(h)));
        }
    }
    write_table(out / "summary_all.csv", all);
}

}  // namespace tscs

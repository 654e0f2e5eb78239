#pragma once

// Scenario files: JSON with a schema_version field. Unknown keys are errors.
// Relative paths resolve against the scenario file's directory.
//
// Floorplan files are CSV with header `id,kind,layer,x0_mm,y0_mm,x1_mm,y1_mm`.

#include <tscs/controller.hpp>
#include <tscs/csv.hpp>
#include <tscs/metrics.hpp>
#include <tscs/model.hpp>
#include <tscs/sensors.hpp>
#include <tscs/shield.hpp>
#include <tscs/workload.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tscs {

inline constexpr int kScenarioSchemaVersion = 1;

struct BenchmarkInput {
    std::string name;
    Trace inst;
};

struct ObserverConfig {
    double noise_std = 0.01;
    double quantization = 0.01;
};

struct MetricConfig {
    SvfOptions svf{200, 100, 300};
    std::size_t k_max = 20;
    double stsf_epsilon = 0.1;
    std::vector<std::size_t> stsf_m{1, 2, 4, 8};
};

struct AttenuationConfig {
    LayerStack stack;
    std::string block;
    std::vector<int> layers;
    SensorConfig sensor;
};

struct Scenario {
    std::string name;
    std::filesystem::path source;
    std::uint64_t seed = 0;

    LayerStack stack;
    GridSpec grid;
    Floorplan floorplan;
    PowerModel power_model;
    std::vector<BenchmarkInput> benchmarks;
    double dt = 0.0;

    std::vector<ShieldPair> pairs;
    std::vector<double> calibration_powers;
    std::optional<std::filesystem::path> p_table_dir;
    std::optional<std::filesystem::path> t_table_path;
    ControllerConfig controller;
    bool kp_auto = true;
    std::vector<double> sweep;

    ObserverConfig observer;
    MetricConfig metrics;
    std::vector<SensorConfig> sensors;
    std::optional<AttenuationConfig> attenuation;

    std::vector<std::string> protected_blocks() const {
        std::vector<std::string> out;
        for (const auto& p : pairs) out.push_back(p.block);
        return out;
    }
};

namespace detail {

using json = nlohmann::json;

// 1-based line of the first occurrence of `"key"` in the source text; 0 if
// not found. Good enough to point a user at the offending entry.
inline std::size_t line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class JsonReader {
public:
    JsonReader(std::string origin, std::string text) : origin_(std::move(origin)), text_(std::move(text)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const std::size_t line = key.empty() ? 0 : line_of_key(text_, key);
        throw ValidationError(origin_ + (line ? ":" + std::to_string(line) : std::string()) + ": " + what);
    }

    void only(const json& obj, const std::string& ctx, std::initializer_list<const char*> keys) const {
        if (!obj.is_object()) fail(ctx, "'" + ctx + "' must be an object");
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : obj.items())
            if (!allowed.count(k)) fail(k, "unknown key '" + k + "' in '" + ctx + "'");
    }

    const json& need(const json& obj, const std::string& key, const std::string& ctx) const {
        auto it = obj.find(key);
        if (it == obj.end()) fail(ctx, "missing key '" + key + "' in '" + ctx + "'");
        return *it;
    }

    double number(const json& v, const std::string& key) const {
        if (!v.is_number()) fail(key, "'" + key + "' must be a number");
        return v.get<double>();
    }

    double number_or(const json& obj, const std::string& key, double def) const {
        auto it = obj.find(key);
        return it == obj.end() ? def : number(*it, key);
    }

    std::size_t count(const json& v, const std::string& key) const {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            fail(key, "'" + key + "' must be a non-negative integer");
        return v.get<std::size_t>();
    }

    std::size_t count_or(const json& obj, const std::string& key, std::size_t def) const {
        auto it = obj.find(key);
        return it == obj.end() ? def : count(*it, key);
    }

    std::string str(const json& v, const std::string& key) const {
        if (!v.is_string()) fail(key, "'" + key + "' must be a string");
        return v.get<std::string>();
    }

    bool boolean_or(const json& obj, const std::string& key, bool def) const {
        auto it = obj.find(key);
        if (it == obj.end()) return def;
        if (!it->is_boolean()) fail(key, "'" + key + "' must be true or false");
        return it->get<bool>();
    }

    std::vector<double> numbers(const json& v, const std::string& key) const {
        if (!v.is_array()) fail(key, "'" + key + "' must be an array");
        std::vector<double> out;
        for (const auto& x : v) out.push_back(number(x, key));
        return out;
    }

    const std::string& text() const { return text_; }
    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::string text_;
};

inline LayerStack parse_stack(const JsonReader& r, const json& j) {
    r.only(j, "stack", {"die_width_mm", "die_height_mm", "ambient_c", "boundary_resistance_top",
                        "boundary_resistance_bottom", "layers"});
    LayerStack st;
    st.die_width = r.number(r.need(j, "die_width_mm", "stack"), "die_width_mm");
    st.die_height = r.number(r.need(j, "die_height_mm", "stack"), "die_height_mm");
    st.ambient_temperature = r.number_or(j, "ambient_c", st.ambient_temperature);
    // null = adiabatic
    auto res = [&](const char* key, double def) {
        auto it = j.find(key);
        if (it == j.end()) return def;
        if (it->is_null()) return std::numeric_limits<double>::infinity();
        return r.number(*it, key);
    };
    st.boundary_resistance_top = res("boundary_resistance_top", st.boundary_resistance_top);
    st.boundary_resistance_bottom = r.number(r.need(j, "boundary_resistance_bottom", "stack"),
                                             "boundary_resistance_bottom");
    const json& layers = r.need(j, "layers", "stack");
    if (!layers.is_array() || layers.empty()) r.fail("layers", "'layers' must be a nonempty array");
    for (const auto& l : layers) {
        r.only(l, "layers", {"thickness_m", "conductivity", "heat_capacity", "interface_resistance"});
        Layer layer;
        layer.thickness = r.number(r.need(l, "thickness_m", "layers"), "thickness_m");
        layer.conductivity = r.number(r.need(l, "conductivity", "layers"), "conductivity");
        layer.volumetric_heat_capacity = r.number(r.need(l, "heat_capacity", "layers"), "heat_capacity");
        layer.interface_resistance = r.number_or(l, "interface_resistance", 0.0);
        st.layers.push_back(layer);
    }
    return st;
}

inline SensorConfig parse_sensor(const JsonReader& r, const json& j, const Floorplan& fp) {
    r.only(j, "sensors", {"id", "mode", "location", "blocks", "sample_interval_s", "noise_std_c",
                          "quantization_c", "blur_radius"});
    SensorConfig s;
    s.id = r.str(r.need(j, "id", "sensors"), "id");
    s.mode = sensor_mode_from_string(r.str(r.need(j, "mode", "sensors"), "mode"));
    s.sample_interval = r.number_or(j, "sample_interval_s", 0.0);
    s.noise_std = r.number_or(j, "noise_std_c", s.noise_std);
    s.quantization = r.number_or(j, "quantization_c", s.quantization);
    s.ir_blur_radius = r.count_or(j, "blur_radius", 0);
    if (auto it = j.find("location"); it != j.end()) {
        const auto loc = r.numbers(*it, "location");
        if (loc.size() != 3) r.fail("location", "'location' must be [layer, row, col]");
        for (double v : loc)
            if (v < 0 || v != std::floor(v)) r.fail("location", "'location' entries must be non-negative integers");
        s.location = {static_cast<std::size_t>(loc[0]), static_cast<std::size_t>(loc[1]),
                      static_cast<std::size_t>(loc[2])};
    } else if (s.mode == SensorMode::external) {
        r.fail(s.id, "external sensor '" + s.id + "' needs a location");
    }
    if (s.mode == SensorMode::builtin) {
        auto it = j.find("blocks");
        if (it == j.end() || !it->is_array() || it->empty())
            r.fail(s.id, "builtin sensor '" + s.id + "' needs a nonempty 'blocks' list");
        for (const auto& b : *it) {
            const std::string id = r.str(b, "blocks");
            if (!fp.find(id)) r.fail(id, "sensor '" + s.id + "' names unknown block '" + id + "'");
        }
    }
    return s;
}

inline std::vector<std::string> sensor_blocks(const json& j) {
    std::vector<std::string> out;
    if (auto it = j.find("blocks"); it != j.end() && it->is_array())
        for (const auto& b : *it) out.push_back(b.get<std::string>());
    return out;
}

inline Phase parse_phase(const JsonReader& r, const json& j, std::size_t channels) {
    r.only(j, "phases", {"duration", "pattern", "period", "duty", "rates"});
    Phase ph;
    ph.duration = r.count(r.need(j, "duration", "phases"), "duration");
    ph.pattern = pattern_from_string(r.str(r.need(j, "pattern", "phases"), "pattern"));
    ph.period = r.count_or(j, "period", ph.period);
    ph.duty = r.number_or(j, "duty", ph.duty);
    const json& rates = r.need(j, "rates", "phases");
    if (!rates.is_array() || rates.size() != channels)
        r.fail("rates", "'rates' must list one entry per channel");
    for (const auto& c : rates) {
        r.only(c, "rates", {"idle", "active", "offset", "pattern", "period"});
        ChannelRate cr;
        cr.idle = r.number_or(c, "idle", 0.0);
        cr.active = r.number(r.need(c, "active", "rates"), "active");
        cr.offset = r.count_or(c, "offset", 0);
        if (auto it = c.find("pattern"); it != c.end()) cr.pattern = pattern_from_string(r.str(*it, "pattern"));
        cr.period = r.count_or(c, "period", 0);
        ph.rates.push_back(cr);
    }
    return ph;
}

}  // namespace detail

inline Floorplan parse_floorplan_csv(const std::string& text, const std::string& origin) {
    const Table t = parse_table_csv(text, {"id", "kind", "layer", "x0_mm", "y0_mm", "x1_mm", "y1_mm"}, origin);
    Floorplan fp;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        Block b;
        b.id = row[0];
        try {
            b.kind = block_kind_from_string(row[1]);
        } catch (const ValidationError& e) {
            throw ValidationError(origin + ":" + std::to_string(i + 2) + ": " + e.what());
        }
        const double layer = table_number(t, i, 2, origin);
        if (layer < 0 || layer != std::floor(layer))
            throw ValidationError(origin + ":" + std::to_string(i + 2) + ": layer must be a non-negative integer");
        b.layer_index = static_cast<int>(layer);
        b.rect = {table_number(t, i, 3, origin), table_number(t, i, 4, origin),
                  table_number(t, i, 5, origin), table_number(t, i, 6, origin)};
        fp.blocks.push_back(b);
    }
    return fp;
}

inline std::string floorplan_to_csv(const Floorplan& fp) {
    Table t;
    t.header = {"id", "kind", "layer", "x0_mm", "y0_mm", "x1_mm", "y1_mm"};
    for (const auto& b : fp.blocks)
        t.rows.push_back({b.id, std::string(to_string(b.kind)), std::to_string(b.layer_index),
                          format_double(b.rect.x0), format_double(b.rect.y0), format_double(b.rect.x1),
                          format_double(b.rect.y1)});
    return t.to_csv();
}

inline void require_valid(const Floorplan& fp, const LayerStack& st, const std::string& origin) {
    const auto v = validate_floorplan(fp, st);
    if (v.empty()) return;
    std::string msg = origin + ": invalid floorplan:";
    for (const auto& x : v) msg += " [" + x.subject + ": " + x.what + "]";
    throw ValidationError(msg);
}

/// Parses scenario JSON. `path` is used for error messages and to resolve
/// relative file references. `seed_override` replaces the file's seed before
/// any workload is generated.
inline Scenario parse_scenario(const std::string& text, const std::filesystem::path& path,
                               std::optional<std::uint64_t> seed_override = {}) {
    using detail::json;
    const detail::JsonReader r(path.string(), text);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t off = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(off > 0 ? off - 1 : 0), '\n');
        throw ValidationError(path.string() + ":" + std::to_string(line) + ": malformed JSON");
    }
    r.only(j, "scenario", {"schema_version", "name", "seed", "stack", "grid", "floorplan", "power_model",
                           "workload", "dt_s", "shield", "observer", "metrics", "sensors", "attenuation"});
    const json& ver = r.need(j, "schema_version", "scenario");
    if (!ver.is_number_integer() || ver.get<int>() != kScenarioSchemaVersion)
        r.fail("schema_version", "unsupported schema_version (expected " +
                                     std::to_string(kScenarioSchemaVersion) + ")");

    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    auto resolve = [&](const std::string& p) {
        std::filesystem::path q(p);
        return q.is_absolute() ? q : base / q;
    };

    Scenario sc;
    sc.source = path;
    sc.name = j.contains("name") ? r.str(j["name"], "name") : path.stem().string();
    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_unsigned()) r.fail("seed", "'seed' must be a non-negative integer");
        sc.seed = it->get<std::uint64_t>();
    }
    if (seed_override) sc.seed = *seed_override;
    sc.stack = detail::parse_stack(r, r.need(j, "stack", "scenario"));
    {
        const json& g = r.need(j, "grid", "scenario");
        r.only(g, "grid", {"rows", "cols", "cell_budget"});
        sc.grid.rows = r.count(r.need(g, "rows", "grid"), "rows");
        sc.grid.cols = r.count(r.need(g, "cols", "grid"), "cols");
        sc.grid.cell_budget = r.count_or(g, "cell_budget", sc.grid.cell_budget);
    }
    {
        const auto fp_path = resolve(r.str(r.need(j, "floorplan", "scenario"), "floorplan"));
        if (!std::filesystem::exists(fp_path))
            throw ValidationError(path.string() + ": floorplan file not found: " + fp_path.string());
        sc.floorplan = parse_floorplan_csv(read_file(fp_path), fp_path.string());
        require_valid(sc.floorplan, sc.stack, fp_path.string());
    }
    {
        const json& pm = r.need(j, "power_model", "scenario");
        if (!pm.is_object()) r.fail("power_model", "'power_model' must be an object");
        for (const auto& [id, e] : pm.items()) {
            if (!sc.floorplan.find(id)) r.fail(id, "power_model names unknown block '" + id + "'");
            r.only(e, "power_model", {"static_w", "energy_per_instruction_j"});
            sc.power_model.blocks[id] = {r.number_or(e, "static_w", 0.0),
                                         r.number_or(e, "energy_per_instruction_j", 0.0)};
        }
    }
    {
        const json& w = r.need(j, "workload", "scenario");
        r.only(w, "workload", {"suite", "cores", "uncore", "sample_interval_s", "trace", "synth", "benchmarks"});
        const double interval = r.number_or(w, "sample_interval_s", 2e-3);
        const int sources = int(w.contains("suite")) + int(w.contains("trace")) + int(w.contains("synth"));
        if (sources != 1) r.fail("workload", "workload needs exactly one of 'suite', 'trace', 'synth'");
        if (w.contains("suite")) {
            if (r.str(w["suite"], "suite") != "default") r.fail("suite", "only the 'default' suite exists");
            std::vector<std::string> cores;
            for (const auto& c : r.need(w, "cores", "workload")) cores.push_back(r.str(c, "cores"));
            const std::string uncore = r.str(r.need(w, "uncore", "workload"), "uncore");
            auto suite = default_suite(cores, uncore, interval);
            std::optional<std::set<std::string>> pick;
            if (auto it = w.find("benchmarks"); it != w.end()) {
                pick.emplace();
                for (const auto& b : *it) pick->insert(r.str(b, "benchmarks"));
            }
            for (auto& b : suite) {
                if (pick && !pick->count(b.name)) continue;
                b.spec.seed += sc.seed;
                sc.benchmarks.push_back({b.name, synth_workload(b.spec)});
                if (pick) pick->erase(b.name);
            }
            if (pick && !pick->empty()) r.fail(*pick->begin(), "unknown benchmark '" + *pick->begin() + "'");
        } else if (w.contains("trace")) {
            const auto tp = resolve(r.str(w["trace"], "trace"));
            if (!std::filesystem::exists(tp))
                throw ValidationError(path.string() + ": trace file not found: " + tp.string());
            sc.benchmarks.push_back({tp.stem().string(), load_trace(tp, {Unit::instructions, {}}).trace});
        } else {
            const json& s = w["synth"];
            r.only(s, "synth", {"name", "channels", "phases", "jitter", "seed"});
            SynthSpec spec;
            for (const auto& c : r.need(s, "channels", "synth")) spec.channels.push_back(r.str(c, "channels"));
            for (const auto& p : r.need(s, "phases", "synth"))
                spec.phases.push_back(detail::parse_phase(r, p, spec.channels.size()));
            spec.sample_interval = interval;
            spec.jitter = r.number_or(s, "jitter", 0.0);
            spec.seed = r.count_or(s, "seed", 0) + sc.seed;
            const std::string nm = s.contains("name") ? r.str(s["name"], "name") : std::string("synth");
            sc.benchmarks.push_back({nm, synth_workload(spec)});
        }
        for (const auto& b : sc.benchmarks)
            for (const auto& ch : b.inst.channels()) {
                if (!sc.floorplan.find(ch)) r.fail(ch, "workload channel '" + ch + "' is not a floorplan block");
                if (!sc.power_model.blocks.count(ch))
                    r.fail(ch, "workload channel '" + ch + "' has no power_model entry");
            }
    }
    sc.dt = r.number_or(j, "dt_s", 0.0);

    if (auto it = j.find("shield"); it != j.end()) {
        const json& s = *it;
        r.only(s, "shield", {"pairs", "calibration_powers_w", "p_table_dir", "t_table", "controller",
                             "sweep_delta_t_c"});
        for (const auto& p : r.need(s, "pairs", "shield")) {
            r.only(p, "pairs", {"block", "generator"});
            ShieldPair sp{r.str(r.need(p, "block", "pairs"), "block"),
                          r.str(r.need(p, "generator", "pairs"), "generator")};
            const Block* b = sc.floorplan.find(sp.block);
            const Block* g = sc.floorplan.find(sp.generator);
            if (!b) r.fail(sp.block, "pair names unknown block '" + sp.block + "'");
            if (!g || g->kind != BlockKind::noise_generator)
                r.fail(sp.generator, "'" + sp.generator + "' is not a noise_generator block");
            sc.pairs.push_back(sp);
        }
        if (sc.pairs.empty()) r.fail("pairs", "'pairs' must not be empty");
        sc.calibration_powers = s.contains("calibration_powers_w")
                                    ? r.numbers(s["calibration_powers_w"], "calibration_powers_w")
                                    : std::vector<double>{0.0, 0.5, 1.0, 2.0};
        if (auto p = s.find("p_table_dir"); p != s.end()) sc.p_table_dir = resolve(r.str(*p, "p_table_dir"));
        if (auto p = s.find("t_table"); p != s.end()) sc.t_table_path = resolve(r.str(*p, "t_table"));
        if (auto c = s.find("controller"); c != s.end()) {
            r.only(*c, "controller", {"security_level", "adjustment_interval", "range_window", "mode", "kp",
                                      "ki", "kd", "power_budget_w", "thermal_limit_c", "global_range"});
            auto& cfg = sc.controller;
            if (auto v = c->find("security_level"); v != c->end())
                cfg.security_level = static_cast<int>(r.count(*v, "security_level"));
            cfg.adjustment_interval = r.count_or(*c, "adjustment_interval", cfg.adjustment_interval);
            cfg.range_window = r.count_or(*c, "range_window", cfg.range_window);
            if (auto v = c->find("mode"); v != c->end()) {
                const auto m = r.str(*v, "mode");
                if (m == "proportional") cfg.mode = ControlMode::proportional;
                else if (m == "pid") cfg.mode = ControlMode::pid;
                else r.fail("mode", "mode must be 'proportional' or 'pid'");
            }
            if (auto v = c->find("kp"); v != c->end()) {
                if (v->is_string() && v->get<std::string>() == "auto") {
                    sc.kp_auto = true;
                } else {
                    cfg.kp = r.number(*v, "kp");
                    sc.kp_auto = false;
                }
            }
            cfg.ki = r.number_or(*c, "ki", cfg.ki);
            cfg.kd = r.number_or(*c, "kd", cfg.kd);
            cfg.power_budget = r.number_or(*c, "power_budget_w", cfg.power_budget);
            cfg.thermal_limit = r.number_or(*c, "thermal_limit_c", cfg.thermal_limit);
            cfg.global_range = r.boolean_or(*c, "global_range", cfg.global_range);
            try {
                cfg.validate();
            } catch (const ValidationError& e) {
                r.fail("controller", e.what());
            }
        }
        if (auto v = s.find("sweep_delta_t_c"); v != s.end()) sc.sweep = r.numbers(*v, "sweep_delta_t_c");
        else
            for (int i = 0; i <= 7; ++i) sc.sweep.push_back(3.5 + 0.5 * i);
    }

    if (auto it = j.find("observer"); it != j.end()) {
        r.only(*it, "observer", {"noise_std_c", "quantization_c"});
        sc.observer.noise_std = r.number_or(*it, "noise_std_c", sc.observer.noise_std);
        sc.observer.quantization = r.number_or(*it, "quantization_c", sc.observer.quantization);
        if (sc.observer.noise_std < 0 || sc.observer.quantization < 0)
            r.fail("observer", "observer noise and quantization must be >= 0");
    }
    if (auto it = j.find("metrics"); it != j.end()) {
        r.only(*it, "metrics", {"svf_window", "svf_stride", "svf_skip", "k_max", "stsf_epsilon_c", "stsf_m"});
        auto& m = sc.metrics;
        m.svf.window = r.count_or(*it, "svf_window", m.svf.window);
        m.svf.stride = r.count_or(*it, "svf_stride", m.svf.stride);
        m.svf.skip = r.count_or(*it, "svf_skip", m.svf.skip);
        m.k_max = r.count_or(*it, "k_max", m.k_max);
        m.stsf_epsilon = r.number_or(*it, "stsf_epsilon_c", m.stsf_epsilon);
        if (auto v = it->find("stsf_m"); v != it->end()) {
            m.stsf_m.clear();
            for (const auto& x : *v) m.stsf_m.push_back(r.count(x, "stsf_m"));
        }
    }

    auto build_sensor = [&](const json& js, const ThermalNetwork* net) {
        SensorConfig s = detail::parse_sensor(r, js, sc.floorplan);
        if (s.mode == SensorMode::builtin && net) s.region = region_of_blocks(*net, detail::sensor_blocks(js));
        return s;
    };
    if (auto it = j.find("sensors"); it != j.end()) {
        if (!it->is_array()) r.fail("sensors", "'sensors' must be an array");
        const ThermalNetwork net = build_network(sc.floorplan, sc.stack, sc.grid);
        for (const auto& s : *it) sc.sensors.push_back(build_sensor(s, &net));
    }
    if (auto it = j.find("attenuation"); it != j.end()) {
        r.only(*it, "attenuation", {"stack", "block", "layers", "sensor"});
        AttenuationConfig a;
        a.stack = detail::parse_stack(r, r.need(*it, "stack", "attenuation"));
        a.block = r.str(r.need(*it, "block", "attenuation"), "block");
        if (!sc.floorplan.find(a.block)) r.fail(a.block, "attenuation block '" + a.block + "' is unknown");
        for (double l : r.numbers(r.need(*it, "layers", "attenuation"), "layers")) {
            if (l < 0 || l != std::floor(l) || l >= static_cast<double>(a.stack.layers.size()))
                r.fail("layers", "attenuation layers must index the attenuation stack");
            a.layers.push_back(static_cast<int>(l));
        }
        a.sensor = build_sensor(r.need(*it, "sensor", "attenuation"), nullptr);
        if (a.sensor.mode != SensorMode::external) r.fail("sensor", "attenuation sensor must be external");
        sc.attenuation = a;
    }
    return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path,
                              std::optional<std::uint64_t> seed_override = {}) {
    if (!std::filesystem::exists(path)) throw ValidationError("scenario file not found: " + path.string());
    return parse_scenario(read_file(path), path, seed_override);
}

}  // namespace tscs

#pragma once

// Thermal-aware side-channel shielding controller.
//
// Per protected block the controller
//   1. recovers the block temperature T_block from its sensor by removing the
//      temperature rise its own noise generator is currently adding,
//   2. tracks the range [T_min, T_max] of T_block over a sliding window,
//      refreshed every adjustment interval,
//   3. walks security levels from the requested one down to 0, picking the
//      threshold T_th = min(T_min + dT(level), T_max) and the generator power
//      cap P_cap = P_table(T_th - T_min), and stops at the first level that
//      fits the power budget and the thermal limit,
//   4. drives its generator with a proportional (or PID) law towards T_th,
//      clipped to [0, P_cap].

#include <tscs/csv.hpp>
#include <tscs/metrics.hpp>
#include <tscs/model.hpp>
#include <tscs/sensors.hpp>
#include <tscs/thermal.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tscs {

struct Lookup {
    double value = 0.0;
    bool clamped = false;
};

/// Monotone piecewise-linear map between injected temperature rise (degC)
/// and generator power (W). The first point is always (0, 0).
class PTable {
public:
    struct Point {
        double delta_t = 0.0;
        double power = 0.0;
        bool operator==(const Point&) const = default;
    };

    PTable() : points_{{0.0, 0.0}} {}

    explicit PTable(std::vector<Point> pts) : points_(std::move(pts)) {
        if (points_.empty()) throw ValidationError("p_table is empty");
        if (points_.front().delta_t != 0.0 || points_.front().power != 0.0)
            throw ValidationError("p_table must start at (0, 0)");
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i].delta_t > points_[i - 1].delta_t))
                throw ValidationError("p_table delta_t must be strictly increasing");
            if (!(points_[i].power >= points_[i - 1].power))
                throw ValidationError("p_table power must be nondecreasing");
        }
    }

    const std::vector<Point>& points() const { return points_; }
    double max_delta_t() const { return points_.back().delta_t; }
    double max_power() const { return points_.back().power; }

    /// Generator power producing a temperature rise of `delta_t`.
    Lookup power_for(double delta_t) const {
        if (delta_t <= 0.0) return {0.0, delta_t < 0.0};
        if (delta_t > max_delta_t()) return {max_power(), true};
        return {interp(delta_t, &Point::delta_t, &Point::power), false};
    }

    /// Temperature rise caused by `power` (inverse lookup).
    Lookup delta_t_for(double power) const {
        if (power <= 0.0) return {0.0, power < 0.0};
        if (power > max_power()) return {max_delta_t(), true};
        return {interp(power, &Point::power, &Point::delta_t), false};
    }

    /// Slope of the last segment, W per degC.
    double slope() const {
        if (points_.size() < 2) return 0.0;
        const auto& a = points_[points_.size() - 2];
        const auto& b = points_.back();
        return (b.power - a.power) / (b.delta_t - a.delta_t);
    }

    Table to_table() const {
        Table t{{"delta_t_c", "power_w"}, {}};
        for (const auto& p : points_) t.rows.push_back({format_double(p.delta_t), format_double(p.power)});
        return t;
    }

    static PTable from_table(const Table& t, const std::string& origin = "<p_table>") {
        std::vector<Point> pts;
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            pts.push_back({table_number(t, r, 0, origin), table_number(t, r, 1, origin)});
        return PTable(std::move(pts));
    }

    bool operator==(const PTable&) const = default;

private:
    double interp(double x, double Point::*from, double Point::*to) const {
        // first point whose `from` is >= x; x lies in (0, max]
        auto it = std::lower_bound(points_.begin(), points_.end(), x,
                                   [&](const Point& p, double v) { return p.*from < v; });
        if (it == points_.begin()) return (*it).*to;
        const Point& b = *it;
        const Point& a = *(it - 1);
        const double span = b.*from - a.*from;
        if (span <= 0.0) return a.*to;
        return a.*to + (b.*to - a.*to) * (x - a.*from) / span;
    }

    std::vector<Point> points_;
};

/// Security level -> temperature increment (degC). Level s is entry s.
class TTable {
public:
    TTable() = default;
    explicit TTable(std::vector<double> increments, bool calibrated = true)
        : inc_(std::move(increments)), calibrated_(calibrated) {
        if (inc_.empty()) throw ValidationError("t_table is empty");
        for (double d : inc_)
            if (!(d >= 0.0) || !std::isfinite(d))
                throw ValidationError("t_table increments must be finite and >= 0");
    }

    /// 3.5 + 0.5 * s degC for s in [0, 7].
    static TTable default_table() {
        std::vector<double> v;
        for (int s = 0; s <= 7; ++s) v.push_back(3.5 + 0.5 * s);
        return TTable(std::move(v), false);
    }

    std::size_t num_levels() const { return inc_.size(); }
    int max_level() const { return static_cast<int>(inc_.size()) - 1; }
    bool calibrated() const { return calibrated_; }
    const std::vector<double>& increments() const { return inc_; }

    double lookup(int level) const {
        if (level < 0 || level > max_level())
            throw ValidationError("security level " + std::to_string(level) + " outside t_table");
        return inc_[static_cast<std::size_t>(level)];
    }

    Table to_table() const {
        Table t{{"level", "delta_t_c"}, {}};
        for (std::size_t i = 0; i < inc_.size(); ++i)
            t.rows.push_back({std::to_string(i), format_double(inc_[i])});
        return t;
    }

    static TTable from_table(const Table& t, const std::string& origin = "<t_table>") {
        std::vector<double> v;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (t.rows[r][0] != std::to_string(r))
                throw ValidationError(origin + ":" + std::to_string(r + 2) +
                                      ": levels must be 0,1,2,... in order");
            v.push_back(table_number(t, r, 1, origin));
        }
        return TTable(std::move(v));
    }

    bool operator==(const TTable&) const = default;

private:
    std::vector<double> inc_{3.5};
    bool calibrated_ = true;
};

enum class ControlMode { proportional, pid };

inline ControlMode control_mode_from_string(std::string_view s) {
    if (s == "proportional") return ControlMode::proportional;
    if (s == "pid") return ControlMode::pid;
    throw ValidationError("unknown controller mode '" + std::string(s) + "'");
}

struct ControllerConfig {
    int security_level = 0;
    std::size_t adjustment_interval = 25;  ///< samples between range refreshes
    std::size_t range_window = 500;        ///< samples of T_block history
    ControlMode mode = ControlMode::proportional;
    double kp = 1.0;  ///< W/degC
    double ki = 0.0;  ///< W/(degC sample)
    double kd = 0.0;  ///< W sample/degC
    double power_budget = 1.0;     ///< W per generator
    double thermal_limit = 125.0;  ///< degC
    /// Share one [T_min, T_max] across all protected blocks so they converge
    /// on a common threshold (hides the spatial ordering).
    bool global_range = false;

    void validate() const {
        if (kp < 0.0 || ki < 0.0 || kd < 0.0) throw ValidationError("controller gains must be >= 0");
        if (!(power_budget >= 0.0)) throw ValidationError("power budget must be >= 0");
        if (adjustment_interval < 1) throw ValidationError("adjustment_interval must be >= 1");
        if (range_window < 1) throw ValidationError("range_window must be >= 1");
        if (security_level < 0) throw ValidationError("security level must be >= 0");
    }
};

struct ControllerState {
    double t_min = 0.0;
    double t_max = 0.0;
    double t_th = 0.0;
    bool initialized = false;
    double last_command = 0.0;
    std::deque<double> history;
    std::size_t countdown = 0;
    double integral = 0.0;
    double last_error = 0.0;
};

struct BlockEstimate {
    double t_block = 0.0;
    double injected = 0.0;  ///< degC attributed to the generator
    bool clamped = false;
};

/// Removes a known injected rise from a sensor reading. Offsets outside the
/// table are clamped to its range and flagged.
inline BlockEstimate estimate_block_temp_from_offset(double t_sensor, double injected_offset,
                                                     const PTable& p_table) {
    if (injected_offset < 0.0) return {t_sensor, 0.0, true};
    if (injected_offset > p_table.max_delta_t())
        return {t_sensor - p_table.max_delta_t(), p_table.max_delta_t(), true};
    return {t_sensor - injected_offset, injected_offset, false};
}

/// T_block from T_sensor: the generator's last command is mapped back through
/// the coupling table to the rise it adds at the block.
inline BlockEstimate estimate_block_temp(double t_sensor, double last_command,
                                         const PTable& p_table) {
    if (last_command == 0.0) return {t_sensor, 0.0, false};
    const Lookup dt = p_table.delta_t_for(last_command);
    return {t_sensor - dt.value, dt.value, dt.clamped};
}

/// Appends T_block to the history; on each adjustment boundary (and on the
/// first call) T_min/T_max are recomputed over the last range_window samples.
inline void update_range(ControllerState& st, double t_block, const ControllerConfig& cfg) {
    st.history.push_back(t_block);
    while (st.history.size() > cfg.range_window) st.history.pop_front();
    if (st.initialized && st.countdown > 1) {
        --st.countdown;
        return;
    }
    const auto [lo, hi] = std::minmax_element(st.history.begin(), st.history.end());
    st.t_min = *lo;
    st.t_max = *hi;
    st.countdown = cfg.adjustment_interval;
    if (!st.initialized) st.t_th = st.t_max;
    st.initialized = true;
    st.t_th = std::clamp(st.t_th, st.t_min, st.t_max);
}

struct ThresholdChoice {
    double t_th = 0.0;
    double p_cap = 0.0;
    int achieved_level = 0;
    bool infeasible = false;
};

/// Threshold for one level: T_max if the range is narrower than the
/// increment, otherwise T_min + increment.
inline double threshold_for(double t_min, double t_max, double increment) {
    return (t_max - t_min < increment) ? t_max : t_min + increment;
}

inline ThresholdChoice select_threshold(double t_min, double t_max, const ControllerConfig& cfg,
                                        const TTable& t_table, const PTable& p_table,
                                        int requested_level) {
    if (t_table.num_levels() == 0 || p_table.points().empty())
        throw ValidationError("controller tables are empty");
    if (t_min > t_max) throw ValidationError("select_threshold: T_min > T_max");
    const int top = std::min(requested_level, t_table.max_level());
    for (int s = top; s >= 0; --s) {
        const double t_th = threshold_for(t_min, t_max, t_table.lookup(s));
        const double p_cap = p_table.power_for(t_th - t_min).value;
        if (p_cap > cfg.power_budget || t_th > cfg.thermal_limit) continue;
        return {t_th, p_cap, s, false};
    }
    const double t_th = threshold_for(t_min, t_max, t_table.lookup(0));
    return {t_th, std::min(p_table.power_for(t_th - t_min).value, cfg.power_budget), 0, true};
}

inline ThresholdChoice select_threshold(const ControllerState& st, const ControllerConfig& cfg,
                                        const TTable& t_table, const PTable& p_table) {
    return select_threshold(st.t_min, st.t_max, cfg, t_table, p_table, cfg.security_level);
}

/// Generator power for the current sample. Proportional: Kp * deficit,
/// clipped to [0, P_cap]. PID adds an anti-windup integral (held in
/// [0, P_cap]) and a derivative term. Zero whenever T_block >= T_th.
inline double generator_command(double t_th, double t_block, double p_cap,
                                const ControllerConfig& cfg, ControllerState& st) {
    const double cap = std::max(0.0, p_cap);
    const double err = t_th - t_block;
    double out = 0.0;
    if (cfg.mode == ControlMode::proportional) {
        out = err > 0.0 ? std::min(cap, cfg.kp * err) : 0.0;
    } else {
        st.integral = std::clamp(st.integral + cfg.ki * err, 0.0, cap);
        const double deriv = cfg.kd * (err - st.last_error);
        st.last_error = err;
        out = err > 0.0 ? std::clamp(cfg.kp * err + st.integral + deriv, 0.0, cap) : 0.0;
    }
    st.last_command = out;
    return out;
}

/// Coupling tables from steady-state solves: every generator at each power
/// level, rise read at each protected block relative to the idle state.
inline std::map<std::string, PTable> calibrate_p_table(const ThermalNetwork& net,
                                                       const std::vector<std::string>& generators,
                                                       const std::vector<std::string>& protected_blocks,
                                                       const std::vector<double>& power_levels) {
    if (power_levels.empty() || power_levels.front() != 0.0)
        throw ValidationError("power levels must start at 0 (idle)");
    for (std::size_t i = 1; i < power_levels.size(); ++i)
        if (!(power_levels[i] > power_levels[i - 1]))
            throw ValidationError("power levels must be strictly ascending");
    std::map<std::string, std::vector<PTable::Point>> pts;
    for (const auto& b : protected_blocks) pts[b] = {{0.0, 0.0}};

    const ThermalState idle = steady_state(net, Eigen::VectorXd::Zero(
                                                    static_cast<Eigen::Index>(net.num_cells())));
    for (std::size_t i = 1; i < power_levels.size(); ++i) {
        std::map<std::string, double> powers;
        for (const auto& g : generators) powers[g] = power_levels[i];
        const ThermalState s = steady_state(net, map_power(powers, net));
        for (const auto& b : protected_blocks) {
            const double rise = block_temperature(s, b, net) - block_temperature(idle, b, net);
            auto& v = pts[b];
            if (!(rise > v.back().delta_t))
                throw RuntimeError("non-monotone temperature response at block '" + b + "'");
            v.push_back({rise, power_levels[i]});
        }
    }
    std::map<std::string, PTable> out;
    for (auto& [b, v] : pts) out.emplace(b, PTable(std::move(v)));
    return out;
}

/// Security levels from a temperature-increment sweep: increments whose SVF
/// exceeds the unshielded SVF are dropped, the rest ranked by SVF descending
/// (level 0 = highest SVF). Ties rank the smaller increment first. If
/// nothing survives the default table comes back flagged uncalibrated.
inline TTable calibrate_t_table(const std::map<double, double>& svf_by_increment,
                                double original_svf) {
    if (svf_by_increment.empty()) throw ValidationError("calibrate_t_table: empty sweep");
    std::vector<std::pair<double, double>> keep;
    for (const auto& [dt, s] : svf_by_increment)
        if (!(s > original_svf)) keep.emplace_back(dt, s);
    if (keep.empty()) return TTable::default_table();
    std::stable_sort(keep.begin(), keep.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<double> inc;
    for (const auto& kv : keep) inc.push_back(kv.first);
    return TTable(std::move(inc), true);
}

struct InjectionPlan {
    Trace power;                 ///< generator watts, one channel per input channel
    std::vector<double> demand;  ///< degC rise demanded, row-major like power
    bool clamped = false;
};

/// Open-loop max_avg command: for each channel, the power whose calibrated
/// rise equals max(trace) - trace(t).
inline InjectionPlan max_avg_injection(const Trace& block_temps, const std::vector<PTable>& tables,
                                       const std::vector<std::string>& generator_names) {
    const std::size_t w = block_temps.num_channels();
    if (tables.size() != w || generator_names.size() != w)
        throw ValidationError("max_avg_injection needs one table and generator per channel");
    std::vector<double> peak(w, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < block_temps.num_samples(); ++i)
        for (std::size_t c = 0; c < w; ++c) peak[c] = std::max(peak[c], block_temps.at(i, c));
    InjectionPlan plan;
    std::vector<double> p;
    p.reserve(block_temps.values().size());
    for (std::size_t i = 0; i < block_temps.num_samples(); ++i)
        for (std::size_t c = 0; c < w; ++c) {
            const double need = peak[c] - block_temps.at(i, c);
            const Lookup l = tables[c].power_for(need);
            plan.clamped = plan.clamped || l.clamped;
            plan.demand.push_back(need);
            p.push_back(l.value);
        }
    plan.power = Trace(block_temps.sample_interval(), generator_names, std::move(p), Unit::watts);
    return plan;
}

}  // namespace tscs

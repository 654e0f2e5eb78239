#pragma once

// Attacker observation models: what a built-in sensor, an external probe on
// a decapsulated surface, or an IR camera records from a simulated cell
// field.

#include <tscs/metrics.hpp>
#include <tscs/model.hpp>
#include <tscs/thermal.hpp>

#include <cfenv>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tscs {

enum class SensorMode { builtin, external, ir_image };

inline SensorMode sensor_mode_from_string(std::string_view s) {
    if (s == "builtin") return SensorMode::builtin;
    if (s == "external") return SensorMode::external;
    if (s == "ir_image") return SensorMode::ir_image;
    throw ValidationError("unknown sensor mode '" + std::string(s) + "'");
}

inline std::string_view to_string(SensorMode m) {
    switch (m) {
    case SensorMode::builtin: return "builtin";
    case SensorMode::external: return "external";
    case SensorMode::ir_image: return "ir_image";
    }
    return "builtin";
}

struct CellLocation {
    std::size_t layer = 0;
    std::size_t row = 0;
    std::size_t col = 0;
};

struct WeightedCell {
    std::size_t cell = 0;
    double weight = 1.0;
};

struct SensorConfig {
    std::string id = "sensor";
    SensorMode mode = SensorMode::builtin;
    CellLocation location;             ///< external mode
    std::vector<WeightedCell> region;  ///< builtin mode; weights are normalized
    double sample_interval = 0.0;      ///< 0 keeps the simulation interval
    double noise_std = 0.0;            ///< degC
    double quantization = 0.0;         ///< degC step, 0 = none
    std::size_t ir_blur_radius = 0;    ///< cells
};

/// Builtin sensor region covering the cells of the given blocks, each cell
/// weighted by its share of block area.
inline std::vector<WeightedCell> region_of_blocks(const ThermalNetwork& net,
                                                  const std::vector<std::string>& blocks) {
    std::vector<WeightedCell> out;
    for (const auto& b : blocks) {
        const auto& bc = net.cells_of(b);
        for (std::size_t k = 0; k < bc.cells.size(); ++k) out.push_back({bc.cells[k], bc.weights[k]});
    }
    return out;
}

/// Rounds to the nearest multiple of `step`, ties to even.
inline double quantize(double v, double step) {
    if (step <= 0.0) return v;
    const int old = std::fegetround();
    std::fesetround(FE_TONEAREST);
    const double q = std::nearbyint(v / step) * step;
    std::fesetround(old);
    return q;
}

inline Trace observe(const Trace& cell_trace, const SensorConfig& cfg, const ThermalNetwork& net,
                     std::uint64_t seed) {
    if (cell_trace.num_channels() != net.num_cells())
        throw ValidationError("cell trace does not match the network");
    if (!(cfg.noise_std >= 0.0) || !(cfg.quantization >= 0.0))
        throw ValidationError("sensor '" + cfg.id + "': noise and quantization must be >= 0");

    const std::size_t n = cell_trace.num_samples();
    std::vector<std::string> channels;
    std::vector<double> v;
    switch (cfg.mode) {
    case SensorMode::builtin: {
        if (cfg.region.empty()) throw ValidationError("sensor '" + cfg.id + "': empty region");
        double wsum = 0.0;
        for (const auto& rc : cfg.region) {
            if (rc.cell >= net.num_cells())
                throw ValidationError("sensor '" + cfg.id + "': region cell off-grid");
            if (!(rc.weight >= 0.0)) throw ValidationError("sensor '" + cfg.id + "': negative weight");
            wsum += rc.weight;
        }
        if (!(wsum > 0.0)) throw ValidationError("sensor '" + cfg.id + "': zero region weight");
        channels.push_back(cfg.id);
        v.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            double t = 0.0;
            for (const auto& rc : cfg.region) t += rc.weight * cell_trace.at(i, rc.cell);
            v.push_back(t / wsum);
        }
        break;
    }
    case SensorMode::external: {
        const auto& loc = cfg.location;
        if (loc.layer >= net.num_layers() || loc.row >= net.rows() || loc.col >= net.cols())
            throw ValidationError("sensor '" + cfg.id + "': location off-grid");
        if (loc.layer != 0 && loc.layer + 1 != net.num_layers())
            throw ValidationError("sensor '" + cfg.id +
                                  "': external probes only reach the top or bottom surface");
        const std::size_t cell = net.cell_index(loc.layer, loc.row, loc.col);
        channels.push_back(cfg.id);
        v.reserve(n);
        for (std::size_t i = 0; i < n; ++i) v.push_back(cell_trace.at(i, cell));
        break;
    }
    case SensorMode::ir_image: {
        const std::size_t top = net.num_layers() - 1;
        const auto rad = static_cast<std::ptrdiff_t>(cfg.ir_blur_radius);
        const auto rows = static_cast<std::ptrdiff_t>(net.rows());
        const auto cols = static_cast<std::ptrdiff_t>(net.cols());
        for (std::size_t r = 0; r < net.rows(); ++r)
            for (std::size_t c = 0; c < net.cols(); ++c)
                channels.push_back(cfg.id + "_R" + std::to_string(r) + "_C" + std::to_string(c));
        v.reserve(n * channels.size());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::ptrdiff_t r = 0; r < rows; ++r) {
                for (std::ptrdiff_t c = 0; c < cols; ++c) {
                    double s = 0.0;
                    int cnt = 0;
                    for (std::ptrdiff_t rr = std::max<std::ptrdiff_t>(0, r - rad);
                         rr <= std::min(rows - 1, r + rad); ++rr)
                        for (std::ptrdiff_t cc = std::max<std::ptrdiff_t>(0, c - rad);
                             cc <= std::min(cols - 1, c + rad); ++cc) {
                            s += cell_trace.at(i, net.cell_index(top, static_cast<std::size_t>(rr),
                                                                 static_cast<std::size_t>(cc)));
                            ++cnt;
                        }
                    v.push_back(s / cnt);
                }
            }
        }
        break;
    }
    }

    Trace obs(cell_trace.sample_interval(), std::move(channels), std::move(v), Unit::celsius);
    if (cfg.sample_interval > 0.0 && cfg.sample_interval != cell_trace.sample_interval())
        obs = resample(obs, cfg.sample_interval);
    if (cfg.noise_std == 0.0 && cfg.quantization == 0.0) return obs;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> out = obs.values();
    for (double& x : out) {
        if (cfg.noise_std > 0.0) x += cfg.noise_std * gauss(rng);
        x = quantize(x, cfg.quantization);
    }
    return Trace(obs.sample_interval(), obs.channels(), std::move(out), Unit::celsius);
}

/// Steady field under the time-averaged power of a block power trace; the
/// usual warm start for a transient run.
inline ThermalState mean_power_state(const ThermalNetwork& net, const Trace& power_trace) {
    PowerMapper mapper(net, power_trace.channels());
    std::vector<double> mean(power_trace.num_channels(), 0.0);
    for (std::size_t i = 0; i < power_trace.num_samples(); ++i)
        for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += power_trace.at(i, c);
    for (double& m : mean) m /= static_cast<double>(std::max<std::size_t>(1, power_trace.num_samples()));
    return steady_state(net, mapper.map(mean));
}

struct AttenuationSetup {
    Floorplan floorplan;
    LayerStack stack;
    GridSpec grid;
    std::string block;        ///< block moved between layers
    Trace power;              ///< block-level watts, includes `block`
    Trace inst;               ///< execution trace correlated against
    SensorConfig sensor;      ///< fixed surface probe
    double dt = 0.0;          ///< 0 = sample_interval / 10
    SvfOptions svf;
    std::size_t k_max = 20;
    std::uint64_t seed = 0;
};

struct LayerLeak {
    int layer = 0;
    SvfReport report;
};

/// Replays the same power trace with the block placed on each candidate
/// layer and reports the SVF a fixed surface sensor achieves (best delay).
inline std::vector<LayerLeak> layer_attenuation_experiment(const AttenuationSetup& setup,
                                                           const std::vector<int>& layers) {
    std::vector<LayerLeak> out;
    for (int layer : layers) {
        Floorplan fp = setup.floorplan;
        bool found = false;
        for (auto& b : fp.blocks)
            if (b.id == setup.block) {
                b.layer_index = layer;
                found = true;
            }
        if (!found) throw ValidationError("unknown block '" + setup.block + "'");
        const ThermalNetwork net = build_network(fp, setup.stack, setup.grid);
        const double dt = setup.dt > 0.0 ? setup.dt : setup.power.sample_interval() / 10.0;
        const Trace cells = transient(net, setup.power, mean_power_state(net, setup.power), dt);
        const Trace obs = observe(cells, setup.sensor, net, setup.seed);
        out.push_back({layer, best_delay(setup.inst, obs, setup.k_max, setup.svf)});
    }
    return out;
}

}  // namespace tscs

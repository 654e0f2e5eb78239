#pragma once

// Per-block activity: synthetic instruction-count traces and a linear
// activity-to-power model.

#include <tscs/csv.hpp>
#include <tscs/model.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tscs {

struct BlockPowerModel {
    double static_power = 0.0;           ///< W
    double energy_per_instruction = 0.0; ///< J
};

/// P_b(t) = static_b + energy_b * count_b(t) / sample_interval
struct PowerModel {
    std::map<std::string, BlockPowerModel> blocks;
};

inline Trace to_power(const Trace& inst, const PowerModel& model) {
    if (inst.unit() != Unit::instructions)
        throw ValidationError("to_power expects an instruction trace");
    std::vector<BlockPowerModel> coeffs;
    for (const auto& ch : inst.channels()) {
        auto it = model.blocks.find(ch);
        if (it == model.blocks.end())
            throw ValidationError("power model has no entry for block '" + ch + "'");
        if (it->second.static_power < 0.0 || it->second.energy_per_instruction < 0.0)
            throw ValidationError("power model for '" + ch + "' has negative coefficients");
        coeffs.push_back(it->second);
    }
    std::vector<double> v(inst.values().size());
    const std::size_t w = inst.num_channels();
    for (std::size_t i = 0; i < inst.num_samples(); ++i)
        for (std::size_t c = 0; c < w; ++c)
            v[i * w + c] = coeffs[c].static_power +
                           coeffs[c].energy_per_instruction * inst.at(i, c) / inst.sample_interval();
    return Trace(inst.sample_interval(), inst.channels(), std::move(v), Unit::watts);
}

enum class Pattern { constant, square, sawtooth, burst };

inline Pattern pattern_from_string(std::string_view s) {
    if (s == "constant") return Pattern::constant;
    if (s == "square") return Pattern::square;
    if (s == "sawtooth") return Pattern::sawtooth;
    if (s == "burst") return Pattern::burst;
    throw ValidationError("unknown pattern '" + std::string(s) + "'");
}

/// Instruction rates of one channel during a phase (instructions/sample).
/// `constant` emits `active`; the periodic patterns swing between the two.
/// A channel may override the phase pattern and period, e.g. a slow uncore
/// ramp under bursty core activity.
struct ChannelRate {
    double idle = 0.0;
    double active = 0.0;
    std::size_t offset = 0;  ///< pattern shift in samples
    std::optional<Pattern> pattern;
    std::size_t period = 0;  ///< 0 = phase period
};

struct Phase {
    std::size_t duration = 1;  ///< samples
    Pattern pattern = Pattern::constant;
    std::size_t period = 10;   ///< samples
    double duty = 0.5;         ///< active fraction of a square/burst period
    std::vector<ChannelRate> rates;  ///< one per channel
};

struct SynthSpec {
    std::vector<std::string> channels;
    std::vector<Phase> phases;
    double sample_interval = 2e-3;
    double jitter = 0.0;  ///< relative Gaussian jitter applied to every sample
    std::uint64_t seed = 0;
};

/// Renders a synthetic spec. Square: active for the first duty*period samples
/// of each period. Sawtooth: linear ramp idle -> active over a period.
/// Burst: during the active part of each period every sample is drawn
/// uniformly in [idle, active]; the rest of the period sits at idle.
inline Trace synth_workload(const SynthSpec& spec) {
    if (spec.channels.empty()) throw ValidationError("synth spec has no channels");
    if (!(spec.jitter >= 0.0)) throw ValidationError("synth jitter must be non-negative");
    const std::size_t w = spec.channels.size();
    std::size_t total = 0;
    for (const auto& ph : spec.phases) {
        if (ph.duration < 1) throw ValidationError("phase duration must be >= 1");
        if (ph.rates.size() != w) throw ValidationError("phase rate count != channel count");
        if (ph.period < 1) throw ValidationError("phase period must be >= 1");
        if (!(ph.duty >= 0.0 && ph.duty <= 1.0)) throw ValidationError("phase duty outside [0,1]");
        for (const auto& r : ph.rates)
            if (r.idle < 0.0 || r.active < 0.0) throw ValidationError("rates must be >= 0");
        total += ph.duration;
    }
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> v;
    v.reserve(total * w);
    for (const auto& ph : spec.phases) {
        for (std::size_t t = 0; t < ph.duration; ++t) {
            for (std::size_t c = 0; c < w; ++c) {
                const auto& r = ph.rates[c];
                const std::size_t period = r.period > 0 ? r.period : ph.period;
                const auto active_len = static_cast<std::size_t>(std::llround(ph.duty * period));
                const std::size_t pos = (t + r.offset) % period;
                double x = r.active;
                switch (r.pattern.value_or(ph.pattern)) {
                case Pattern::constant: x = r.active; break;
                case Pattern::square: x = pos < active_len ? r.active : r.idle; break;
                case Pattern::sawtooth:
                    x = r.idle + (r.active - r.idle) * static_cast<double>(pos) /
                                     static_cast<double>(period);
                    break;
                case Pattern::burst:
                    x = pos < active_len ? r.idle + (r.active - r.idle) * uni(rng) : r.idle;
                    break;
                }
                if (spec.jitter > 0.0) x = std::max(0.0, x * (1.0 + spec.jitter * gauss(rng)));
                v.push_back(x);
            }
        }
    }
    return Trace(spec.sample_interval, spec.channels, std::move(v), Unit::instructions);
}

struct Benchmark {
    std::string name;
    SynthSpec spec;
};

namespace detail {

// Per-core rates: idle and active levels are spread across cores so blocks
// heat unevenly, and each core's pattern is shifted by `stagger` samples.
inline std::vector<ChannelRate> core_rates(std::size_t cores, double idle, double active,
                                           std::size_t stagger) {
    std::vector<ChannelRate> out;
    for (std::size_t i = 0; i < cores; ++i) {
        const double fi = static_cast<double>(i);
        const double fa = static_cast<double>((i * 3) % 8);
        out.push_back({idle * (0.5 + 0.15 * fi), active * (0.6 + 0.07 * fa), stagger * i, {}, 0});
    }
    return out;
}

}  // namespace detail

/// Fifteen synthetic benchmarks over `cores` core channels plus one uncore
/// channel (last). They cover periodic, bursty and phase-change activity.
/// Uncore activity is flat except in `burst_drift`, where it ramps slowly
/// under bursty core activity.
inline std::vector<Benchmark> default_suite(const std::vector<std::string>& cores,
                                            const std::string& uncore,
                                            double sample_interval = 2e-3) {
    const std::size_t nc = cores.size();
    if (nc == 0) throw ValidationError("default_suite needs at least one core channel");
    std::vector<std::string> channels = cores;
    channels.push_back(uncore);

    constexpr double uncore_mid = 1.6e7;
    const ChannelRate flat{uncore_mid, uncore_mid, 0, Pattern::constant, 0};
    const ChannelRate ramp{0.0, 2.0 * uncore_mid, 0, Pattern::sawtooth, 400};

    auto phase = [&](std::size_t duration, Pattern p, std::size_t period, double duty,
                     double idle, double active, std::size_t stagger, const ChannelRate& un) {
        Phase ph{duration, p, period, duty, detail::core_rates(nc, idle, active, stagger)};
        ph.rates.push_back(un);
        return ph;
    };

    std::vector<Benchmark> out;
    auto add = [&](std::string name, std::vector<Phase> phases) {
        SynthSpec spec;
        spec.channels = channels;
        spec.phases = std::move(phases);
        spec.sample_interval = sample_interval;
        spec.jitter = 0.01;
        spec.seed = 1000 + out.size();
        out.push_back({std::move(name), std::move(spec)});
    };
    using P = Pattern;
    add("square_long", {phase(2000, P::square, 100, 0.5, 2e5, 5e6, 7, flat)});
    add("square_medium", {phase(2000, P::square, 40, 0.5, 2e5, 5e6, 3, flat)});
    add("square_fast", {phase(2000, P::square, 16, 0.5, 2e5, 5e6, 1, flat)});
    add("square_sparse", {phase(2000, P::square, 60, 0.2, 2e5, 5e6, 6, flat)});
    add("sawtooth_slow", {phase(2000, P::sawtooth, 150, 0.5, 3e5, 5e6, 11, flat)});
    add("sawtooth_medium", {phase(2000, P::sawtooth, 60, 0.5, 3e5, 5e6, 5, flat)});
    add("sawtooth_fast", {phase(2000, P::sawtooth, 20, 0.5, 3e5, 5e6, 2, flat)});
    add("burst_dense", {phase(2000, P::burst, 30, 0.6, 5e5, 5e6, 4, flat)});
    add("burst_medium", {phase(2000, P::burst, 80, 0.3, 2e5, 6e6, 0, flat)});
    add("burst_sparse", {phase(2000, P::burst, 200, 0.15, 3e5, 6e6, 17, flat)});
    add("burst_drift", {phase(2000, P::burst, 50, 0.5, 5e5, 5e6, 2, ramp)});
    add("phase_change", {phase(700, P::constant, 10, 0.5, 1e6, 1e6, 0, flat),
                         phase(600, P::square, 100, 0.4, 3e5, 5e6, 7, flat),
                         phase(700, P::constant, 10, 0.5, 4e6, 4e6, 0, flat)});
    add("phase_ramp_square", {phase(1000, P::sawtooth, 80, 0.5, 3e5, 5e6, 3, flat),
                              phase(1000, P::square, 50, 0.5, 3e5, 5e6, 3, flat)});
    add("phase_square_burst", {phase(1000, P::square, 60, 0.5, 3e5, 5e6, 5, flat),
                               phase(1000, P::burst, 60, 0.5, 3e5, 5e6, 5, flat)});
    {
        std::vector<Phase> steps;
        for (std::size_t k = 0; k < 10; ++k) {
            const double lv = 1e6 * static_cast<double>(1 + (k * 7) % 5);
            steps.push_back(phase(200, P::constant, 10, 0.5, lv, lv, 0, flat));
        }
        add("phase_steps", std::move(steps));
    }
    return out;
}

}  // namespace tscs

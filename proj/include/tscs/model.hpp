#pragma once

// Domain types shared by every stage of the pipeline: floorplan, layer stack,
// grid discretization and uniformly sampled traces.
//
// Units: lateral coordinates in millimeters, physical constants in SI,
// temperatures in degrees Celsius.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tscs {

/// Bad input: malformed files, broken invariants, out-of-domain arguments.
/// The CLI maps it to exit status 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Failure while computing on valid input (singular network, inconsistent
/// calibration). The CLI maps it to exit status 2.
class RuntimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }

    double overlap_area(const Rect& o) const {
        const double w = std::min(x1, o.x1) - std::max(x0, o.x0);
        const double h = std::min(y1, o.y1) - std::max(y0, o.y0);
        return (w > 0.0 && h > 0.0) ? w * h : 0.0;
    }
};

enum class BlockKind { functional, noise_generator, sensor_region };

inline std::string_view to_string(BlockKind k) {
    switch (k) {
    case BlockKind::functional: return "functional";
    case BlockKind::noise_generator: return "noise_generator";
    case BlockKind::sensor_region: return "sensor_region";
    }
    return "functional";
}

inline BlockKind block_kind_from_string(std::string_view s) {
    if (s == "functional") return BlockKind::functional;
    if (s == "noise_generator") return BlockKind::noise_generator;
    if (s == "sensor_region") return BlockKind::sensor_region;
    throw ValidationError("unknown block kind '" + std::string(s) + "'");
}

struct Block {
    std::string id;
    Rect rect;
    int layer_index = 0;
    BlockKind kind = BlockKind::functional;
};

struct Layer {
    double thickness = 0.0;                 ///< m
    double conductivity = 0.0;              ///< W/(m K)
    double volumetric_heat_capacity = 0.0;  ///< J/(m^3 K)
    /// Extra resistance between this layer and the one above it, (K m^2)/W.
    /// Models bonding interfaces (SiP / TSV stacking); 0 for monolithic.
    double interface_resistance = 0.0;
};

/// Layers are ordered bottom (index 0, heat-sink side) to top (package
/// surface). A boundary resistance of +inf makes that face adiabatic.
struct LayerStack {
    std::vector<Layer> layers;
    double die_width = 0.0;   ///< mm
    double die_height = 0.0;  ///< mm
    double ambient_temperature = 45.0;
    double boundary_resistance_top = std::numeric_limits<double>::infinity();
    double boundary_resistance_bottom = 0.0;

    std::size_t num_layers() const { return layers.size(); }
    Rect die() const { return {0.0, 0.0, die_width, die_height}; }
};

inline constexpr std::size_t kDefaultCellBudget = 65536;

struct GridSpec {
    std::size_t rows = 1;
    std::size_t cols = 1;
    std::size_t cell_budget = kDefaultCellBudget;
};

struct Floorplan {
    std::vector<Block> blocks;

    const Block* find(std::string_view id) const {
        for (const auto& b : blocks)
            if (b.id == id) return &b;
        return nullptr;
    }

    const Block& at(std::string_view id) const {
        if (const Block* b = find(id)) return *b;
        throw ValidationError("unknown block '" + std::string(id) + "'");
    }

    std::vector<std::string> ids_of_kind(BlockKind k) const {
        std::vector<std::string> out;
        for (const auto& b : blocks)
            if (b.kind == k) out.push_back(b.id);
        return out;
    }
};

struct Violation {
    std::string subject;  ///< block id or field name
    std::string what;

    bool operator==(const Violation&) const = default;
};

/// Checks every structural invariant of a floorplan against its stack.
/// Violations are returned as data; the function never throws.
inline std::vector<Violation> validate_floorplan(const Floorplan& fp, const LayerStack& stack) {
    std::vector<Violation> out;
    if (stack.layers.empty()) out.push_back({"stack", "no layers"});
    for (std::size_t i = 0; i < stack.layers.size(); ++i) {
        const auto& l = stack.layers[i];
        const std::string name = "layer[" + std::to_string(i) + "]";
        if (!(l.thickness > 0.0)) out.push_back({name, "thickness must be positive"});
        if (!(l.conductivity > 0.0)) out.push_back({name, "conductivity must be positive"});
        if (!(l.volumetric_heat_capacity > 0.0))
            out.push_back({name, "volumetric_heat_capacity must be positive"});
        if (!(l.interface_resistance >= 0.0))
            out.push_back({name, "interface_resistance must be non-negative"});
    }
    if (!(stack.die_width > 0.0) || !(stack.die_height > 0.0))
        out.push_back({"stack", "die dimensions must be positive"});
    if (!(stack.boundary_resistance_top > 0.0))
        out.push_back({"stack", "boundary_resistance_top must be positive"});
    if (!(stack.boundary_resistance_bottom > 0.0))
        out.push_back({"stack", "boundary_resistance_bottom must be positive"});
    if (!std::isfinite(stack.ambient_temperature))
        out.push_back({"stack", "ambient_temperature must be finite"});

    std::set<std::string> seen;
    const Rect die = stack.die();
    for (const auto& b : fp.blocks) {
        if (b.id.empty()) out.push_back({"<unnamed>", "empty block id"});
        if (!seen.insert(b.id).second) out.push_back({b.id, "duplicate block id"});
        if (!(b.rect.x0 < b.rect.x1) || !(b.rect.y0 < b.rect.y1))
            out.push_back({b.id, "degenerate rect"});
        else if (b.rect.x0 < die.x0 || b.rect.y0 < die.y0 || b.rect.x1 > die.x1 ||
                 b.rect.y1 > die.y1)
            out.push_back({b.id, "rect outside die bounds"});
        if (b.layer_index < 0 || static_cast<std::size_t>(b.layer_index) >= stack.layers.size())
            out.push_back({b.id, "layer_index out of range"});
    }
    return out;
}

enum class Unit { instructions, watts, celsius };

inline std::string_view to_string(Unit u) {
    switch (u) {
    case Unit::instructions: return "instructions";
    case Unit::watts: return "watts";
    case Unit::celsius: return "celsius";
    }
    return "instructions";
}

inline Unit unit_from_string(std::string_view s) {
    if (s == "instructions") return Unit::instructions;
    if (s == "watts") return Unit::watts;
    if (s == "celsius") return Unit::celsius;
    throw ValidationError("unknown trace unit '" + std::string(s) + "'");
}

/// Dense, uniformly sampled multi-channel time series stored row-major
/// [sample][channel]. Immutable once built.
class Trace {
public:
    Trace() = default;

    Trace(double sample_interval, std::vector<std::string> channels, std::vector<double> values,
          Unit unit)
        : interval_(sample_interval), channels_(std::move(channels)), values_(std::move(values)),
          unit_(unit) {
        if (!(interval_ > 0.0) || !std::isfinite(interval_))
            throw ValidationError("trace sample_interval must be positive");
        if (channels_.empty()) throw ValidationError("trace needs at least one channel");
        if (values_.size() % channels_.size() != 0)
            throw ValidationError("trace values are not a whole number of rows");
        for (double v : values_)
            if (!std::isfinite(v)) throw ValidationError("trace contains NaN/Inf");
    }

    /// Builds a trace from per-channel columns of equal length.
    static Trace from_columns(double sample_interval, std::vector<std::string> channels,
                              const std::vector<std::vector<double>>& columns, Unit unit) {
        if (columns.size() != channels.size())
            throw ValidationError("column count does not match channel count");
        const std::size_t n = columns.empty() ? 0 : columns.front().size();
        for (const auto& c : columns)
            if (c.size() != n) throw ValidationError("trace columns differ in length");
        std::vector<double> v(n * columns.size());
        for (std::size_t c = 0; c < columns.size(); ++c)
            for (std::size_t i = 0; i < n; ++i) v[i * columns.size() + c] = columns[c][i];
        return Trace(sample_interval, std::move(channels), std::move(v), unit);
    }

    double sample_interval() const { return interval_; }
    Unit unit() const { return unit_; }
    const std::vector<std::string>& channels() const { return channels_; }
    std::size_t num_channels() const { return channels_.size(); }
    std::size_t num_samples() const { return channels_.empty() ? 0 : values_.size() / channels_.size(); }
    const std::vector<double>& values() const { return values_; }

    double at(std::size_t sample, std::size_t channel) const {
        return values_[sample * channels_.size() + channel];
    }
    std::span<const double> row(std::size_t sample) const {
        return {values_.data() + sample * channels_.size(), channels_.size()};
    }

    std::size_t channel_index(std::string_view id) const {
        for (std::size_t i = 0; i < channels_.size(); ++i)
            if (channels_[i] == id) return i;
        throw ValidationError("trace has no channel '" + std::string(id) + "'");
    }

    std::vector<double> column(std::size_t channel) const {
        std::vector<double> out(num_samples());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, channel);
        return out;
    }

    /// Samples [begin, end) as a new trace.
    Trace slice(std::size_t begin, std::size_t end) const {
        if (begin > end || end > num_samples()) throw ValidationError("trace slice out of range");
        const std::size_t w = channels_.size();
        return Trace(interval_, channels_,
                     std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(begin * w),
                                         values_.begin() + static_cast<std::ptrdiff_t>(end * w)),
                     unit_);
    }

    /// Keeps only the named channels, in the given order.
    Trace select(const std::vector<std::string>& ids) const {
        std::vector<std::size_t> idx;
        for (const auto& id : ids) idx.push_back(channel_index(id));
        std::vector<double> v;
        v.reserve(num_samples() * idx.size());
        for (std::size_t i = 0; i < num_samples(); ++i)
            for (std::size_t c : idx) v.push_back(at(i, c));
        return Trace(interval_, ids, std::move(v), unit_);
    }

    /// Mean over all samples and channels.
    double mean() const {
        if (values_.empty()) return 0.0;
        double s = 0.0;
        for (double v : values_) s += v;
        return s / static_cast<double>(values_.size());
    }

    /// Per-sample sum across channels, as a single-channel trace.
    Trace row_sums(std::string name) const {
        std::vector<double> v(num_samples(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i)
            for (double x : row(i)) v[i] += x;
        return Trace(interval_, {std::move(name)}, std::move(v), unit_);
    }

    bool operator==(const Trace&) const = default;

private:
    double interval_ = 1.0;
    std::vector<std::string> channels_;
    std::vector<double> values_;
    Unit unit_ = Unit::instructions;
};

/// Rebins a trace to a coarser interval. Instruction and power samples are
/// summed within each bin; temperatures are averaged. A trailing partial bin
/// is dropped.
inline Trace resample(const Trace& trace, double new_interval) {
    const double ratio = new_interval / trace.sample_interval();
    const double rounded = std::round(ratio);
    if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw ValidationError("resample ratio " + std::to_string(ratio) +
                              " is not a positive integer");
    const auto factor = static_cast<std::size_t>(rounded);
    const std::size_t bins = trace.num_samples() / factor;
    const std::size_t w = trace.num_channels();
    std::vector<double> v(bins * w, 0.0);
    for (std::size_t b = 0; b < bins; ++b)
        for (std::size_t k = 0; k < factor; ++k)
            for (std::size_t c = 0; c < w; ++c) v[b * w + c] += trace.at(b * factor + k, c);
    if (trace.unit() == Unit::celsius)
        for (double& x : v) x /= static_cast<double>(factor);
    return Trace(trace.sample_interval() * static_cast<double>(factor), trace.channels(),
                 std::move(v), trace.unit());
}

}  // namespace tscs

#pragma once

// Compact RC thermal grid model. Each layer of the stack is cut into
// rows x cols cells; cells couple laterally to their four in-layer neighbours,
// vertically to the cell above/below, and the bottom/top faces couple to
// ambient through the boundary resistances. Temperatures are solved as
// offsets above ambient:  G * theta = P  (steady)  and
// (C/dt + G) * theta_{n+1} = (C/dt) * theta_n + P_n  (backward Euler).

#include <tscs/model.hpp>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace tscs {

class ThermalNetwork;
inline ThermalNetwork build_network(const Floorplan&, const LayerStack&, const GridSpec&);

/// Cells covered by one block with normalized area weights (sum to 1).
struct BlockCells {
    std::vector<std::size_t> cells;
    std::vector<double> weights;
};

/// Fraction of a cell's area a block must overlap for the cell to count as
/// covered by that block.
inline constexpr double kMinCoveredCellFraction = 0.05;

class ThermalNetwork {
public:
    using SparseMatrix = Eigen::SparseMatrix<double>;

    std::size_t num_layers() const { return layers_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t cells_per_layer() const { return rows_ * cols_; }
    std::size_t num_cells() const { return layers_ * rows_ * cols_; }

    std::size_t cell_index(std::size_t layer, std::size_t row, std::size_t col) const {
        return (layer * rows_ + row) * cols_ + col;
    }

    const SparseMatrix& conductance() const { return g_; }
    const Eigen::VectorXd& capacitance() const { return c_; }
    /// Conductance from each cell straight to ambient (W/K); already folded
    /// into the diagonal of conductance().
    const Eigen::VectorXd& ambient_conductance() const { return g_amb_; }
    double ambient() const { return ambient_; }
    double cell_area_m2() const { return cell_area_; }

    const std::map<std::string, BlockCells>& block_cells() const { return blocks_; }

    const BlockCells& cells_of(const std::string& id) const {
        auto it = blocks_.find(id);
        if (it == blocks_.end()) throw ValidationError("unknown block '" + id + "'");
        return it->second;
    }

    bool has_block(const std::string& id) const { return blocks_.count(id) != 0; }

    std::vector<std::string> cell_names() const {
        std::vector<std::string> out;
        out.reserve(num_cells());
        for (std::size_t l = 0; l < layers_; ++l)
            for (std::size_t r = 0; r < rows_; ++r)
                for (std::size_t c = 0; c < cols_; ++c)
                    out.push_back("L" + std::to_string(l) + "_R" + std::to_string(r) + "_C" +
                                  std::to_string(c));
        return out;
    }

    /// Assembles a network directly from matrices. Used for hand-built test
    /// circuits; build_network() is the normal entry point.
    static ThermalNetwork from_matrices(SparseMatrix g, Eigen::VectorXd c, Eigen::VectorXd g_amb,
                                        double ambient) {
        ThermalNetwork n;
        n.layers_ = 1;
        n.rows_ = 1;
        n.cols_ = static_cast<std::size_t>(c.size());
        n.g_ = std::move(g);
        n.c_ = std::move(c);
        n.g_amb_ = std::move(g_amb);
        n.ambient_ = ambient;
        return n;
    }

    void add_block(const std::string& id, BlockCells cells) { blocks_[id] = std::move(cells); }

private:
    friend ThermalNetwork build_network(const Floorplan&, const LayerStack&, const GridSpec&);

    std::size_t layers_ = 0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    double cell_area_ = 0.0;
    double ambient_ = 0.0;
    SparseMatrix g_;
    Eigen::VectorXd c_;
    Eigen::VectorXd g_amb_;
    std::map<std::string, BlockCells> blocks_;
};

inline ThermalNetwork build_network(const Floorplan& fp, const LayerStack& stack,
                                    const GridSpec& grid) {
    if (auto v = validate_floorplan(fp, stack); !v.empty())
        throw ValidationError("invalid floorplan: " + v.front().subject + ": " + v.front().what);
    if (grid.rows == 0 || grid.cols == 0) throw ValidationError("grid rows/cols must be positive");
    const std::size_t n_cells = grid.rows * grid.cols * stack.layers.size();
    if (n_cells > grid.cell_budget)
        throw ValidationError("grid needs " + std::to_string(n_cells) + " cells, budget is " +
                              std::to_string(grid.cell_budget));

    ThermalNetwork net;
    net.layers_ = stack.layers.size();
    net.rows_ = grid.rows;
    net.cols_ = grid.cols;
    net.ambient_ = stack.ambient_temperature;

    const double dx = stack.die_width * 1e-3 / static_cast<double>(grid.cols);
    const double dy = stack.die_height * 1e-3 / static_cast<double>(grid.rows);
    const double area = dx * dy;
    net.cell_area_ = area;

    net.c_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_cells));
    net.g_amb_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_cells));
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_cells));
    std::vector<Eigen::Triplet<double>> trip;
    auto couple = [&](std::size_t a, std::size_t b, double g) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        trip.emplace_back(ia, ib, -g);
        trip.emplace_back(ib, ia, -g);
        diag[ia] += g;
        diag[ib] += g;
    };

    for (std::size_t l = 0; l < net.layers_; ++l) {
        const Layer& layer = stack.layers[l];
        // Neighbouring cells: k * (t * shared edge) / centre distance.
        const double g_x = layer.conductivity * layer.thickness * dy / dx;
        const double g_y = layer.conductivity * layer.thickness * dx / dy;
        for (std::size_t r = 0; r < grid.rows; ++r) {
            for (std::size_t c = 0; c < grid.cols; ++c) {
                const std::size_t i = net.cell_index(l, r, c);
                net.c_[static_cast<Eigen::Index>(i)] =
                    layer.volumetric_heat_capacity * area * layer.thickness;
                if (c + 1 < grid.cols) couple(i, net.cell_index(l, r, c + 1), g_x);
                if (r + 1 < grid.rows) couple(i, net.cell_index(l, r + 1, c), g_y);
                if (l + 1 < net.layers_) {
                    const Layer& up = stack.layers[l + 1];
                    const double r_v = layer.thickness / (2.0 * layer.conductivity * area) +
                                       up.thickness / (2.0 * up.conductivity * area) +
                                       layer.interface_resistance / area;
                    couple(i, net.cell_index(l + 1, r, c), 1.0 / r_v);
                }
            }
        }
    }
    auto to_ambient = [&](std::size_t layer, double r_boundary) {
        if (!std::isfinite(r_boundary)) return;
        for (std::size_t r = 0; r < grid.rows; ++r)
            for (std::size_t c = 0; c < grid.cols; ++c)
                net.g_amb_[static_cast<Eigen::Index>(net.cell_index(layer, r, c))] +=
                    area / r_boundary;
    };
    to_ambient(0, stack.boundary_resistance_bottom);
    to_ambient(net.layers_ - 1, stack.boundary_resistance_top);

    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n_cells); ++i)
        trip.emplace_back(i, i, diag[i] + net.g_amb_[i]);
    net.g_.resize(static_cast<Eigen::Index>(n_cells), static_cast<Eigen::Index>(n_cells));
    net.g_.setFromTriplets(trip.begin(), trip.end());
    net.g_.makeCompressed();

    for (const auto& b : fp.blocks) {
        BlockCells bc;
        const auto l = static_cast<std::size_t>(b.layer_index);
        double total = 0.0;
        for (std::size_t r = 0; r < grid.rows; ++r) {
            for (std::size_t c = 0; c < grid.cols; ++c) {
                const Rect cell{static_cast<double>(c) * stack.die_width / grid.cols,
                                static_cast<double>(r) * stack.die_height / grid.rows,
                                static_cast<double>(c + 1) * stack.die_width / grid.cols,
                                static_cast<double>(r + 1) * stack.die_height / grid.rows};
                const double ov = cell.overlap_area(b.rect);
                if (ov < kMinCoveredCellFraction * cell.area()) continue;
                bc.cells.push_back(net.cell_index(l, r, c));
                bc.weights.push_back(ov);
                total += ov;
            }
        }
        if (bc.cells.empty())
            throw ValidationError("block '" + b.id + "' is finer than the grid resolution");
        for (double& w : bc.weights) w /= total;
        net.blocks_[b.id] = std::move(bc);
    }
    return net;
}

/// Adds `watts` for one block into a cell power vector.
inline void add_block_power(Eigen::VectorXd& power, const BlockCells& bc, double watts) {
    for (std::size_t k = 0; k < bc.cells.size(); ++k)
        power[static_cast<Eigen::Index>(bc.cells[k])] += watts * bc.weights[k];
}

/// Distributes block powers over their covered cells by overlap area.
inline Eigen::VectorXd map_power(const std::map<std::string, double>& block_powers,
                                 const ThermalNetwork& net) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_cells()));
    for (const auto& [id, w] : block_powers) add_block_power(p, net.cells_of(id), w);
    return p;
}

struct ThermalState {
    Eigen::VectorXd temperatures;  ///< degC, one per cell
    double time = 0.0;
};

inline ThermalState ambient_state(const ThermalNetwork& net) {
    return {Eigen::VectorXd::Constant(static_cast<Eigen::Index>(net.num_cells()), net.ambient()),
            0.0};
}

inline void require_ambient_path(const ThermalNetwork& net) {
    if (!(net.ambient_conductance().sum() > 0.0))
        throw RuntimeError("thermal network is singular: no path to ambient");
}

/// Solves G * (T - T_amb) = P.
inline ThermalState steady_state(const ThermalNetwork& net, const Eigen::VectorXd& power) {
    if (power.size() != static_cast<Eigen::Index>(net.num_cells()))
        throw ValidationError("power vector length does not match cell count");
    if (!power.allFinite()) throw ValidationError("power vector has non-finite entries");
    require_ambient_path(net);
    Eigen::SimplicialLDLT<ThermalNetwork::SparseMatrix> ldlt(net.conductance());
    if (ldlt.info() != Eigen::Success) throw RuntimeError("conductance factorization failed");
    Eigen::VectorXd theta = ldlt.solve(power);
    // One step of iterative refinement keeps the residual at rounding level
    // on badly scaled stacks (thin monolithic layers).
    const Eigen::VectorXd resid = power - net.conductance() * theta;
    theta += ldlt.solve(resid);
    return {theta.array() + net.ambient(), 0.0};
}

/// Backward-Euler integrator with (C/dt + G) factored once.
class TransientSolver {
public:
    TransientSolver(const ThermalNetwork& net, double dt) : net_(&net), dt_(dt) {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
        require_ambient_path(net);
        c_over_dt_ = net.capacitance() / dt;
        ThermalNetwork::SparseMatrix a = net.conductance();
        for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += c_over_dt_[i];
        ldlt_.compute(a);
        if (ldlt_.info() != Eigen::Success) throw RuntimeError("transient factorization failed");
    }

    double dt() const { return dt_; }
    const ThermalNetwork& network() const { return *net_; }

    /// Advances `theta` (offsets above ambient) by `steps` steps of dt under
    /// constant cell power.
    void advance(Eigen::VectorXd& theta, const Eigen::VectorXd& power, std::size_t steps) const {
        for (std::size_t s = 0; s < steps; ++s) {
            rhs_ = c_over_dt_.cwiseProduct(theta) + power;
            theta = ldlt_.solve(rhs_);
        }
    }

    void advance(ThermalState& state, const Eigen::VectorXd& power, std::size_t steps) const {
        Eigen::VectorXd theta = state.temperatures.array() - net_->ambient();
        advance(theta, power, steps);
        state.temperatures = theta.array() + net_->ambient();
        state.time += dt_ * static_cast<double>(steps);
    }

private:
    const ThermalNetwork* net_;
    double dt_;
    Eigen::VectorXd c_over_dt_;
    mutable Eigen::VectorXd rhs_;
    Eigen::SimplicialLDLT<ThermalNetwork::SparseMatrix> ldlt_;
};

/// Number of integration steps per trace sample; rejects a dt that does not
/// divide the sample interval.
inline std::size_t substeps_per_sample(double sample_interval, double dt) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    const double ratio = sample_interval / dt;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * ratio)
        throw ValidationError("dt does not divide the sample interval");
    return static_cast<std::size_t>(n);
}

/// Cell power vectors for each sample of a block-level power trace.
class PowerMapper {
public:
    PowerMapper(const ThermalNetwork& net, const std::vector<std::string>& channels)
        : net_(&net) {
        for (const auto& ch : channels) cells_.push_back(&net.cells_of(ch));
    }

    Eigen::VectorXd map(std::span<const double> row) const {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net_->num_cells()));
        for (std::size_t c = 0; c < cells_.size(); ++c) add_block_power(p, *cells_[c], row[c]);
        return p;
    }

private:
    const ThermalNetwork* net_;
    std::vector<const BlockCells*> cells_;
};

/// Simulates a block-level power trace (zero-order hold per sample). Row n
/// of the result is the cell field at the end of sample n.
inline Trace transient(const ThermalNetwork& net, const Trace& power_trace,
                       const ThermalState& initial, double dt) {
    if (power_trace.unit() != Unit::watts) throw ValidationError("transient needs a power trace");
    const std::size_t steps = substeps_per_sample(power_trace.sample_interval(), dt);
    TransientSolver solver(net, dt);
    PowerMapper mapper(net, power_trace.channels());
    if (initial.temperatures.size() != static_cast<Eigen::Index>(net.num_cells()))
        throw ValidationError("initial state length does not match cell count");

    Eigen::VectorXd theta = initial.temperatures.array() - net.ambient();
    std::vector<double> out;
    out.reserve(power_trace.num_samples() * net.num_cells());
    for (std::size_t n = 0; n < power_trace.num_samples(); ++n) {
        solver.advance(theta, mapper.map(power_trace.row(n)), steps);
        for (Eigen::Index i = 0; i < theta.size(); ++i) out.push_back(theta[i] + net.ambient());
    }
    return Trace(power_trace.sample_interval(), net.cell_names(), std::move(out), Unit::celsius);
}

/// Area-weighted mean temperature of a block's cells.
inline double block_temperature(const Eigen::VectorXd& cell_temps, const BlockCells& bc) {
    double t = 0.0;
    for (std::size_t k = 0; k < bc.cells.size(); ++k)
        t += bc.weights[k] * cell_temps[static_cast<Eigen::Index>(bc.cells[k])];
    return t;
}

inline double block_temperature(const ThermalState& state, const std::string& block,
                                const ThermalNetwork& net) {
    return block_temperature(state.temperatures, net.cells_of(block));
}

/// Per-sample block temperatures from a cell-level trace.
inline Trace block_temperatures(const Trace& cell_trace, const std::vector<std::string>& blocks,
                                const ThermalNetwork& net) {
    if (cell_trace.num_channels() != net.num_cells())
        throw ValidationError("cell trace width does not match network");
    std::vector<double> v;
    v.reserve(cell_trace.num_samples() * blocks.size());
    std::vector<const BlockCells*> bcs;
    for (const auto& b : blocks) bcs.push_back(&net.cells_of(b));
    for (std::size_t n = 0; n < cell_trace.num_samples(); ++n) {
        const auto row = cell_trace.row(n);
        for (const auto* bc : bcs) {
            double t = 0.0;
            for (std::size_t k = 0; k < bc->cells.size(); ++k) t += bc->weights[k] * row[bc->cells[k]];
            v.push_back(t);
        }
    }
    return Trace(cell_trace.sample_interval(), blocks, std::move(v), Unit::celsius);
}

/// Heat leaving through the ambient boundary for a given field, W.
inline double heat_to_ambient(const ThermalNetwork& net, const Eigen::VectorXd& cell_temps) {
    return net.ambient_conductance().dot((cell_temps.array() - net.ambient()).matrix());
}

}  // namespace tscs

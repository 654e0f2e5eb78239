#pragma once

// Leakage metrics.
//
// Temporal: the side-channel vulnerability factor (SVF). Each trace is turned
// into a similarity vector of pairwise standardized Euclidean distances
// between its samples; the SVF is the Pearson correlation between the
// execution trace's similarity vector and the observation trace's similarity
// vector taken k samples later.
//
// Spatial: the spatial thermal side-channel factor (STSF), the fraction of
// the ordering entropy ln(n!) still visible when n block temperatures
// collapse into m indistinguishable equal-size groups.

#include <tscs/model.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace tscs {

/// Channels whose standard deviation falls below this are ignored.
inline constexpr double kMinChannelStd = 1e-12;
/// Pearson inputs with population variance below this count as constant.
inline constexpr double kMinPearsonVariance = 1e-18;

inline double standardized_euclidean(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> s) {
    if (x.size() != y.size() || x.size() != s.size())
        throw ValidationError("standardized_euclidean: length mismatch");
    double acc = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        if (s[c] < kMinChannelStd) continue;
        const double d = (x[c] - y[c]) / s[c];
        acc += d * d;
    }
    return std::sqrt(acc);
}

/// Sample standard deviation (n - 1) of every channel over the whole trace.
inline std::vector<double> channel_stds(const Trace& t) {
    const std::size_t n = t.num_samples();
    const std::size_t w = t.num_channels();
    std::vector<double> out(w, 0.0);
    if (n < 2) return out;
    for (std::size_t c = 0; c < w; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += t.at(i, c);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = t.at(i, c) - mean;
            ss += d * d;
        }
        out[c] = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return out;
}

/// Half-open sample range [begin, end).
struct Window {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

struct SimilarityEntry {
    std::size_t i = 0;
    std::size_t j = 0;
    double distance = 0.0;
};

struct SimilarityVector {
    std::vector<SimilarityEntry> entries;
    std::vector<double> channel_stds;
};

/// Distances for every pair i > j inside the window, in row order
/// (i ascending, then j ascending). Standard deviations come from the full
/// trace so windows stay comparable.
inline SimilarityVector similarity_vector(const Trace& trace, Window window) {
    if (window.end <= window.begin || window.size() < 3)
        throw ValidationError("similarity window needs at least 3 samples");
    if (window.end > trace.num_samples())
        throw ValidationError("similarity window exceeds trace bounds");
    SimilarityVector sv;
    sv.channel_stds = channel_stds(trace);
    sv.entries.reserve(window.size() * (window.size() - 1) / 2);
    for (std::size_t i = window.begin; i < window.end; ++i)
        for (std::size_t j = window.begin; j < i; ++j)
            sv.entries.push_back({i, j, standardized_euclidean(trace.row(i), trace.row(j),
                                                               sv.channel_stds)});
    return sv;
}

struct PearsonResult {
    double r = 0.0;
    bool zero_variance = false;
};

inline PearsonResult pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ValidationError("pearson: length mismatch");
    if (xs.size() < 2) throw ValidationError("pearson needs at least 2 pairs");
    const auto n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx / n < kMinPearsonVariance || syy / n < kMinPearsonVariance) return {0.0, true};
    const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
    return {std::clamp(r, -1.0, 1.0), false};
}

struct SvfReport {
    double svf = 0.0;
    double abs_svf = 0.0;
    std::size_t delay_k = 0;
    std::size_t num_pairs = 0;
    bool zero_variance = false;
};

/// Trace pre-divided by its channel standard deviations; distances between
/// rows of this are standardized Euclidean distances of the original.
class StandardizedRows {
public:
    explicit StandardizedRows(const Trace& t) : n_(t.num_samples()) {
        const auto s = channel_stds(t);
        for (std::size_t c = 0; c < s.size(); ++c)
            if (s[c] >= kMinChannelStd) keep_.push_back(c);
        data_.resize(n_ * keep_.size());
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < keep_.size(); ++k)
                data_[i * keep_.size() + k] = t.at(i, keep_[k]) / s[keep_[k]];
    }

    std::size_t num_samples() const { return n_; }

    double distance(std::size_t i, std::size_t j) const {
        const std::size_t w = keep_.size();
        const double* a = data_.data() + i * w;
        const double* b = data_.data() + j * w;
        double acc = 0.0;
        for (std::size_t k = 0; k < w; ++k) {
            const double d = a[k] - b[k];
            acc += d * d;
        }
        return std::sqrt(acc);
    }

private:
    std::size_t n_;
    std::vector<std::size_t> keep_;
    std::vector<double> data_;
};

namespace detail {

inline void require_same_interval(const Trace& a, const Trace& b) {
    const double ia = a.sample_interval(), ib = b.sample_interval();
    if (std::abs(ia - ib) > 1e-9 * std::max(ia, ib))
        throw ValidationError("traces have different sample intervals");
}

inline void append_pairs(const StandardizedRows& inst, const StandardizedRows& temp,
                         std::size_t k, Window w, std::vector<double>& xs,
                         std::vector<double>& ys) {
    for (std::size_t i = w.begin; i < w.end; ++i)
        for (std::size_t j = w.begin; j < i; ++j) {
            xs.push_back(inst.distance(i, j));
            ys.push_back(temp.distance(i + k, j + k));
        }
}

inline SvfReport report_from(const std::vector<double>& xs, const std::vector<double>& ys,
                             std::size_t k) {
    const auto p = pearson(xs, ys);
    return {p.r, std::abs(p.r), k, xs.size(), p.zero_variance};
}

}  // namespace detail

/// SVF over one window of the execution trace, with the observation trace
/// delayed by k samples.
inline SvfReport svf(const Trace& trace_inst, const Trace& trace_temp, std::size_t k,
                     Window window) {
    detail::require_same_interval(trace_inst, trace_temp);
    if (window.size() < 3 || window.end <= window.begin)
        throw ValidationError("svf window needs at least 3 samples");
    if (window.end > trace_inst.num_samples() || window.end - 1 + k >= trace_temp.num_samples())
        throw ValidationError("insufficient samples for svf window at delay " + std::to_string(k));
    const StandardizedRows inst(trace_inst), temp(trace_temp);
    std::vector<double> xs, ys;
    detail::append_pairs(inst, temp, k, window, xs, ys);
    return detail::report_from(xs, ys, k);
}

/// Windowing for whole-trace SVF. Pairs from all windows are pooled into one
/// Pearson coefficient.
struct SvfOptions {
    std::size_t window = 200;
    std::size_t stride = 200;
    std::size_t skip = 0;  ///< leading samples ignored (warm-up)
};

/// Windows of the execution trace usable for every delay up to `k_reserve`.
inline std::vector<Window> svf_windows(std::size_t n_inst, std::size_t n_temp,
                                       std::size_t k_reserve, const SvfOptions& opt) {
    if (opt.stride == 0) throw ValidationError("svf stride must be positive");
    const std::size_t limit = std::min(n_inst, n_temp > k_reserve ? n_temp - k_reserve : 0);
    std::vector<Window> out;
    if (limit <= opt.skip || limit - opt.skip < 3)
        throw ValidationError("insufficient samples for svf");
    if (limit - opt.skip < opt.window) {
        out.push_back({opt.skip, limit});
        return out;
    }
    for (std::size_t b = opt.skip; b + opt.window <= limit; b += opt.stride)
        out.push_back({b, b + opt.window});
    return out;
}

/// Whole-trace SVF at delay k over the windows reserved for `k_reserve`.
inline SvfReport svf_pooled(const StandardizedRows& inst, const StandardizedRows& temp,
                            std::size_t k, const std::vector<Window>& windows) {
    std::vector<double> xs, ys;
    for (const auto& w : windows) detail::append_pairs(inst, temp, k, w, xs, ys);
    return detail::report_from(xs, ys, k);
}

inline SvfReport svf_trace(const Trace& trace_inst, const Trace& trace_temp, std::size_t k,
                           const SvfOptions& opt = {}) {
    detail::require_same_interval(trace_inst, trace_temp);
    const StandardizedRows inst(trace_inst), temp(trace_temp);
    return svf_pooled(inst, temp, k,
                      svf_windows(trace_inst.num_samples(), trace_temp.num_samples(), k, opt));
}

/// Delay maximizing |SVF| over k in [0, k_max]; ties go to the smaller k.
/// Every k is evaluated on the same windows.
inline SvfReport best_delay(const Trace& trace_inst, const Trace& trace_temp, std::size_t k_max,
                            const SvfOptions& opt = {}) {
    detail::require_same_interval(trace_inst, trace_temp);
    const StandardizedRows inst(trace_inst), temp(trace_temp);
    const auto windows =
        svf_windows(trace_inst.num_samples(), trace_temp.num_samples(), k_max, opt);
    SvfReport best = svf_pooled(inst, temp, 0, windows);
    for (std::size_t k = 1; k <= k_max; ++k) {
        SvfReport r = svf_pooled(inst, temp, k, windows);
        if (r.abs_svf > best.abs_svf) best = r;
    }
    return best;
}

struct StsfReport {
    std::size_t n = 0;
    std::size_t m = 0;
    double stsf = 0.0;
};

inline StsfReport stsf(std::size_t n, std::size_t m) {
    if (n < 1) throw ValidationError("stsf needs at least one block");
    if (m < 1 || m > n) throw ValidationError("stsf group count must lie in [1, n]");
    if (n % m != 0) throw ValidationError("stsf group count must divide block count");
    if (n == 1) return {n, m, 0.0};
    const double ln_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
    const double ln_group_fact = std::lgamma(static_cast<double>(n / m) + 1.0);
    const double v = (ln_n_fact - static_cast<double>(m) * ln_group_fact) / ln_n_fact;
    return {n, m, std::clamp(v, 0.0, 1.0)};
}

/// Sorts blocks hottest first (ties by id) and splits the order into m
/// equal groups.
inline std::vector<std::vector<std::string>> group_blocks(
    const std::map<std::string, double>& block_temps, std::size_t m) {
    const std::size_t n = block_temps.size();
    if (m < 1 || n == 0 || n % m != 0)
        throw ValidationError("group count must divide block count");
    std::vector<std::pair<std::string, double>> sorted(block_temps.begin(), block_temps.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::vector<std::string>> groups(m);
    const std::size_t per = n / m;
    for (std::size_t r = 0; r < n; ++r) groups[r / per].push_back(sorted[r].first);
    return groups;
}

/// Number of distinguishable temperature levels: runs of the descending
/// sort separated by gaps larger than epsilon, rounded down to a divisor of
/// the block count.
inline std::size_t effective_groups(std::vector<double> temps, double epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    const std::size_t n = temps.size();
    if (n == 0) return 0;
    std::sort(temps.begin(), temps.end(), std::greater<>());
    std::size_t runs = 1;
    for (std::size_t i = 1; i < n; ++i)
        if (temps[i - 1] - temps[i] > epsilon) ++runs;
    while (n % runs != 0) --runs;
    return runs;
}

/// Mean over samples of the per-sample channel sum.
inline double mean_total(const Trace& t) {
    if (t.num_samples() == 0) return 0.0;
    double s = 0.0;
    for (double v : t.values()) s += v;
    return s / static_cast<double>(t.num_samples());
}

/// Metric of power utilization: generator power relative to the max_avg run.
inline double mpu(const Trace& gen_power, const Trace& gen_power_max_avg) {
    if (gen_power.num_samples() == 0 || gen_power_max_avg.num_samples() == 0)
        throw ValidationError("mpu needs nonempty traces");
    const double denom = mean_total(gen_power_max_avg);
    return denom == 0.0 ? 0.0 : mean_total(gen_power) / denom;
}

/// Generator power as a fraction of total system power.
inline double power_overhead(const Trace& gen_power, const Trace& total_power) {
    detail::require_same_interval(gen_power, total_power);
    const double total = mean_total(total_power);
    if (total == 0.0) return 0.0;
    return mean_total(gen_power) / total;
}

inline double scaled_svf(double svf_value, double mpu_value) { return svf_value * mpu_value; }

/// Geometric mean of |x| with a floor so a single zero does not collapse it.
inline double geometric_mean_abs(std::span<const double> xs, double floor = 1e-4) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += std::log(std::max(std::abs(x), floor));
    return std::exp(acc / static_cast<double>(xs.size()));
}

}  // namespace tscs

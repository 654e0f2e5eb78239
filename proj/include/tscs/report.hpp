#pragma once

// SVG figures from shield-run summaries: grouped |SVF| bars with scaled-SVF
// dots, MPU bars, power-overhead bars, and a three-panel thermal map.
// Output is deterministic apart from the version comment on line 2.

#include <tscs/csv.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#ifndef TSCS_VERSION
#define TSCS_VERSION "0.0.0"
#endif

namespace tscs {

inline constexpr const char* kToolVersion = TSCS_VERSION;

namespace svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string header(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" font-family=\"sans-serif\" font-size=\"11\">\n<!-- tscs " + kToolVersion + " -->\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline std::string text(double x, double y, const std::string& s, const std::string& extra = "") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\"" + (extra.empty() ? "" : " " + extra) + ">" +
           escape(s) + "</text>\n";
}

inline std::string rect(double x, double y, double w, double h, const std::string& fill) {
    return "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" fill=\"" + fill + "\"/>\n";
}

/// Fixed categorical palette, cycled.
inline std::string color(std::size_t i) {
    static const char* p[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860",
                              "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd", "#2f4b7c", "#a05195"};
    return p[i % (sizeof p / sizeof p[0])];
}

/// Blue-to-red ramp over [0, 1].
inline std::string heat(double f) {
    f = std::clamp(f, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(40 + 215 * f));
    const int g = static_cast<int>(std::lround(60 + 120 * (1.0 - std::abs(2.0 * f - 1.0))));
    const int b = static_cast<int>(std::lround(255 - 215 * f));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace svg

/// One value per (group, series); `dots` optionally overlays a second value.
struct BarChart {
    std::string title;
    std::string y_label;
    std::vector<std::string> groups;  ///< x axis (benchmarks, g_mean last)
    std::vector<std::string> series;  ///< settings
    std::map<std::pair<std::string, std::string>, double> bars;
    std::map<std::pair<std::string, std::string>, double> dots;
    std::string dot_label;
};

inline std::string render_bar_chart(const BarChart& c) {
    const double left = 60, top = 40, plot_h = 260, bar_w = 7, gap = 14;
    const double group_w = bar_w * static_cast<double>(std::max<std::size_t>(1, c.series.size())) + gap;
    const double plot_w = group_w * static_cast<double>(std::max<std::size_t>(1, c.groups.size()));
    const double legend_h = 16.0 * static_cast<double>(c.series.size() + (c.dots.empty() ? 0 : 1));
    const double w = left + plot_w + 20, h = top + plot_h + 110 + legend_h;

    double ymax = 0.0;
    for (const auto& [k, v] : c.bars) ymax = std::max(ymax, v);
    for (const auto& [k, v] : c.dots) ymax = std::max(ymax, v);
    ymax = ymax > 0.0 ? std::ceil(ymax * 10.0) / 10.0 : 1.0;
    auto y_of = [&](double v) { return top + plot_h - plot_h * std::clamp(v / ymax, 0.0, 1.0); };

    std::string s = svg::header(w, h);
    s += svg::text(left, 20, c.title, "font-size=\"14\"");
    for (int t = 0; t <= 5; ++t) {
        const double v = ymax * t / 5.0;
        const double y = y_of(v);
        s += "<line x1=\"" + svg::num(left) + "\" x2=\"" + svg::num(left + plot_w) + "\" y1=\"" + svg::num(y) +
             "\" y2=\"" + svg::num(y) + "\" stroke=\"#dddddd\"/>\n";
        s += svg::text(left - 6, y + 4, svg::num(v), "text-anchor=\"end\"");
    }
    s += svg::text(14, top + plot_h / 2, c.y_label,
                   "transform=\"rotate(-90 14 " + svg::num(top + plot_h / 2) + ")\" text-anchor=\"middle\"");
    for (std::size_t g = 0; g < c.groups.size(); ++g) {
        const double gx = left + gap / 2 + group_w * static_cast<double>(g);
        for (std::size_t k = 0; k < c.series.size(); ++k) {
            const auto key = std::make_pair(c.groups[g], c.series[k]);
            const double x = gx + bar_w * static_cast<double>(k);
            if (auto it = c.bars.find(key); it != c.bars.end()) {
                const double y = y_of(it->second);
                s += svg::rect(x, y, bar_w - 1, top + plot_h - y, svg::color(k));
            }
            if (auto it = c.dots.find(key); it != c.dots.end())
                s += "<circle cx=\"" + svg::num(x + bar_w / 2) + "\" cy=\"" + svg::num(y_of(it->second)) +
                     "\" r=\"2.5\" fill=\"black\"/>\n";
        }
        const double lx = gx + (group_w - gap) / 2, ly = top + plot_h + 10;
        s += svg::text(lx, ly, c.groups[g],
                       "transform=\"rotate(45 " + svg::num(lx) + " " + svg::num(ly) + ")\"" +
                           (c.groups[g] == "g_mean" ? " font-weight=\"bold\"" : ""));
    }
    s += "<line x1=\"" + svg::num(left) + "\" x2=\"" + svg::num(left + plot_w) + "\" y1=\"" +
         svg::num(top + plot_h) + "\" y2=\"" + svg::num(top + plot_h) + "\" stroke=\"black\"/>\n";
    double ly = top + plot_h + 100;
    for (std::size_t k = 0; k < c.series.size(); ++k, ly += 16) {
        s += svg::rect(left, ly - 9, 10, 10, svg::color(k));
        s += svg::text(left + 16, ly, c.series[k]);
    }
    if (!c.dots.empty()) {
        s += "<circle cx=\"" + svg::num(left + 5) + "\" cy=\"" + svg::num(ly - 4) + "\" r=\"2.5\" fill=\"black\"/>\n";
        s += svg::text(left + 16, ly, c.dot_label);
    }
    s += "</svg>\n";
    return s;
}

/// Mean temperature per cell of one layer, rows x cols.
struct HeatPanel {
    std::string title;
    std::size_t rows = 0, cols = 0;
    std::vector<double> temps;  ///< row-major
};

/// Panels side by side on a shared colour scale.
inline std::string render_heatmaps(const std::string& title, const std::vector<HeatPanel>& panels) {
    const double cell = 36, pad = 30, top = 50;
    double lo = 1e300, hi = -1e300;
    std::size_t rows = 0, cols = 0;
    for (const auto& p : panels) {
        rows = std::max(rows, p.rows);
        cols = std::max(cols, p.cols);
        for (double t : p.temps) {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    if (!(hi > lo)) hi = lo + 1.0;
    const double pw = cell * static_cast<double>(cols);
    const double w = pad + (pw + pad) * static_cast<double>(panels.size());
    const double h = top + cell * static_cast<double>(rows) + 60;
    std::string s = svg::header(w, h);
    s += svg::text(pad, 20, title, "font-size=\"14\"");
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& pn = panels[p];
        const double x0 = pad + (pw + pad) * static_cast<double>(p);
        s += svg::text(x0, top - 8, pn.title);
        for (std::size_t r = 0; r < pn.rows; ++r)
            for (std::size_t c = 0; c < pn.cols; ++c) {
                const double t = pn.temps[r * pn.cols + c];
                s += svg::rect(x0 + cell * static_cast<double>(c), top + cell * static_cast<double>(r), cell,
                               cell, svg::heat((t - lo) / (hi - lo)));
            }
    }
    s += svg::text(pad, h - 20, "scale " + svg::num(lo) + " .. " + svg::num(hi) + " degC");
    s += "</svg>\n";
    return s;
}

}  // namespace tscs

#pragma once

// CSV I/O for traces and tables.
//
// Trace files: header `time_s,<channel>,...`, one row per sample, time_s
// strictly increasing with uniform spacing, '.' decimal separator, '\n'
// line endings. Numbers are written in shortest round-trip form so reruns
// are byte-identical.

#include <tscs/model.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace tscs {

inline std::string format_double(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

/// Writes `content` to `path` through a temporary file and rename, so a
/// reader never sees a half-written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw RuntimeError("cannot write " + tmp.string());
        f << content;
        if (!f) throw RuntimeError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string trace_to_csv(const Trace& t) {
    std::string out = "time_s";
    for (const auto& c : t.channels()) out += "," + c;
    out += "\n";
    for (std::size_t i = 0; i < t.num_samples(); ++i) {
        out += format_double(static_cast<double>(i) * t.sample_interval());
        for (double v : t.row(i)) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

inline void write_trace_csv(const std::filesystem::path& path, const Trace& t) {
    atomic_write(path, trace_to_csv(t));
}

struct TraceSchema {
    Unit unit = Unit::instructions;
    std::vector<std::string> required_channels;
};

struct LoadedTrace {
    Trace trace;
    std::size_t rows = 0;
};

/// Parses trace CSV text. `origin` prefixes error messages (file name).
inline LoadedTrace parse_trace_csv(const std::string& text, const TraceSchema& schema,
                                   const std::string& origin = "<trace>") {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(origin + ": empty file");
    const auto header = split_csv_line(line);
    if (header.empty() || header.front() != "time_s")
        throw ValidationError(origin + ":1: header must start with 'time_s'");
    std::vector<std::string> channels(header.begin() + 1, header.end());
    if (channels.empty()) throw ValidationError(origin + ":1: no channel columns");
    for (const auto& req : schema.required_channels)
        if (std::find(channels.begin(), channels.end(), req) == channels.end())
            throw ValidationError(origin + ":1: missing column '" + req + "'");

    std::vector<double> times;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        const std::string where = origin + ":" + std::to_string(line_no) + ": ";
        if (fields.size() != header.size())
            throw ValidationError(where + "expected " + std::to_string(header.size()) +
                                  " fields, got " + std::to_string(fields.size()));
        double t = 0.0;
        if (!parse_double(fields[0], t) || !std::isfinite(t))
            throw ValidationError(where + "bad time_s value '" + fields[0] + "'");
        if (!times.empty() && !(t > times.back()))
            throw ValidationError(where + "time_s is not strictly increasing");
        times.push_back(t);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], v))
                throw ValidationError(where + "bad value '" + fields[c] + "' in column '" +
                                      header[c] + "'");
            if (!std::isfinite(v))
                throw ValidationError(where + "non-finite value in column '" + header[c] + "'");
            values.push_back(v);
        }
    }
    if (times.size() < 2) throw ValidationError(origin + ": need at least 2 samples");
    const double dt = times[1] - times[0];
    for (std::size_t i = 2; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt)
            throw ValidationError(origin + ":" + std::to_string(i + 2) +
                                  ": non-uniform time_s spacing");
    const std::size_t rows = times.size();
    return {Trace(dt, std::move(channels), std::move(values), schema.unit), rows};
}

inline LoadedTrace load_trace(const std::filesystem::path& path, const TraceSchema& schema) {
    return parse_trace_csv(read_file(path), schema, path.string());
}

/// Plain table: header row plus string cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const {
        std::string out;
        auto put = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                out += r[i];
            }
            out += '\n';
        };
        put(header);
        for (const auto& r : rows) put(r);
        return out;
    }

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ValidationError("table has no column '" + std::string(name) + "'");
    }
};

inline Table parse_table_csv(const std::string& text, const std::vector<std::string>& expected,
                             const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    Table t;
    if (!std::getline(in, line)) throw ValidationError(origin + ": empty file");
    t.header = split_csv_line(line);
    if (!expected.empty() && t.header != expected) {
        std::string want;
        for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
        throw ValidationError(origin + ":1: expected header '" + want + "'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != t.header.size())
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": wrong field count");
        t.rows.push_back(std::move(f));
    }
    return t;
}

inline Table load_table(const std::filesystem::path& path, const std::vector<std::string>& expected) {
    return parse_table_csv(read_file(path), expected, path.string());
}

inline double table_number(const Table& t, std::size_t row, std::size_t col,
                           const std::string& origin = "<table>") {
    double v = 0.0;
    if (!parse_double(t.rows[row][col], v) || !std::isfinite(v))
        throw ValidationError(origin + ":" + std::to_string(row + 2) + ": bad number '" +
                              t.rows[row][col] + "'");
    return v;
}

}  // namespace tscs

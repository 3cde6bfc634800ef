#include "wginv/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace wginv {

std::string CsvWriter::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw ConfigError("CSV row width does not match the header");
    rows_.push_back(std::move(cells));
}

std::string CsvWriter::str() const {
    std::string out;
    for (std::size_t c = 0; c < header_.size(); ++c) {
        if (c) out += ',';
        out += header_[c];
    }
    out += '\n';
    for (const auto& r : rows_) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c) out += ',';
            out += r[c];
        }
        out += '\n';
    }
    return out;
}

void CsvWriter::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << str();
}

void write_field_binary(const std::string& path, const SpatialField& f) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw ConfigError("cannot write '" + path + "'");
    bin.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
    std::ofstream hdr(path + ".hdr");
    hdr << "dtype float64 little-endian\n"
        << "order comp x1 x2 x3\n"
        << "shape " << f.ncomp() << " " << f.n1() << " " << f.n2() << " " << f.n3()
        << "\n";
}

SpatialField read_field_binary(const std::string& path) {
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw ConfigError("missing sidecar header for '" + path + "'");
    std::string word;
    int nc = 0, n1 = 0, n2 = 0, n3 = 0;
    while (hdr >> word) {
        if (word == "shape") {
            hdr >> nc >> n1 >> n2 >> n3;
        }
    }
    SpatialField f(nc, n1, n2, n3);
    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw ConfigError("cannot read '" + path + "'");
    bin.read(reinterpret_cast<char*>(f.data()),
             static_cast<std::streamsize>(f.size() * sizeof(double)));
    return f;
}

void write_slice_binary(const std::string& path, const SliceField& f) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw ConfigError("cannot write '" + path + "'");
    bin.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    std::ofstream hdr(path + ".hdr");
    hdr << "dtype float64 little-endian\n"
        << "order t x1 x2\n"
        << "shape " << f.n_t << " " << f.n_x << " " << f.n_x << "\n"
        << "dt " << CsvWriter::num(f.dt) << "\n"
        << "dx " << CsvWriter::num(f.dx) << "\n"
        << "x_lo " << CsvWriter::num(f.x_lo) << "\n";
}

namespace {

struct Mapper {
    double x0, x1, y0, y1;  // data range
    double px0 = 60, px1 = 560, py0 = 360, py1 = 40;
    double mx(double x) const { return px0 + (x - x0) / (x1 - x0 + 1e-300) * (px1 - px0); }
    double my(double y) const { return py0 + (y - y0) / (y1 - y0 + 1e-300) * (py1 - py0); }
};

}  // namespace

std::string svg_line_chart(const std::vector<double>& x, const std::vector<double>& y,
                           const std::string& title, bool loglog) {
    std::vector<double> xs = x, ys = y;
    if (loglog) {
        for (auto& v : xs) v = std::log10(std::max(v, 1e-300));
        for (auto& v : ys) v = std::log10(std::max(v, 1e-300));
    }
    Mapper m{*std::min_element(xs.begin(), xs.end()),
             *std::max_element(xs.begin(), xs.end()),
             *std::min_element(ys.begin(), ys.end()),
             *std::max_element(ys.begin(), ys.end())};
    std::string s = "<svg xmlns='http://www.w3.org/2000/svg' width='600' height='400'>\n";
    s += "<rect width='600' height='400' fill='white'/>\n";
    s += "<text x='300' y='20' text-anchor='middle' font-size='14'>" + title +
         (loglog ? " (log-log)" : "") + "</text>\n";
    s += "<line x1='60' y1='360' x2='560' y2='360' stroke='black'/>\n";
    s += "<line x1='60' y1='40' x2='60' y2='360' stroke='black'/>\n";
    s += "<polyline fill='none' stroke='steelblue' stroke-width='2' points='";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s += CsvWriter::num(m.mx(xs[i])) + "," + CsvWriter::num(m.my(ys[i])) + " ";
    }
    s += "'/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        s += "<circle cx='" + CsvWriter::num(m.mx(xs[i])) + "' cy='" +
             CsvWriter::num(m.my(ys[i])) + "' r='3' fill='crimson'/>\n";
    s += "</svg>\n";
    return s;
}

std::string svg_heatmap(const SliceField& f, int t_index, const std::string& title) {
    double vmax = 1e-300;
    for (int b1 = 0; b1 < f.n_x; ++b1)
        for (int b2 = 0; b2 < f.n_x; ++b2)
            vmax = std::max(vmax, std::abs(f.at(t_index, b1, b2)));
    const int cell = 24;
    int w = 80 + f.n_x * cell, h = 60 + f.n_x * cell;
    std::string s = "<svg xmlns='http://www.w3.org/2000/svg' width='" +
                    std::to_string(w) + "' height='" + std::to_string(h) + "'>\n";
    s += "<rect width='" + std::to_string(w) + "' height='" + std::to_string(h) +
         "' fill='white'/>\n";
    s += "<text x='" + std::to_string(w / 2) + "' y='20' text-anchor='middle' "
         "font-size='13'>" + title + "</text>\n";
    for (int b1 = 0; b1 < f.n_x; ++b1) {
        for (int b2 = 0; b2 < f.n_x; ++b2) {
            double v = f.at(t_index, b1, b2) / vmax;  // [-1, 1]
            int r = v > 0 ? 255 : static_cast<int>(255 * (1.0 + v));
            int b = v < 0 ? 255 : static_cast<int>(255 * (1.0 - v));
            int gch = static_cast<int>(255 * (1.0 - std::abs(v)));
            s += "<rect x='" + std::to_string(40 + b1 * cell) + "' y='" +
                 std::to_string(40 + (f.n_x - 1 - b2) * cell) + "' width='" +
                 std::to_string(cell) + "' height='" + std::to_string(cell) +
                 "' fill='rgb(" + std::to_string(r) + "," + std::to_string(gch) + "," +
                 std::to_string(b) + ")'/>\n";
        }
    }
    s += "</svg>\n";
    return s;
}

std::string content_hash(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string run_manifest_json(const std::string& config_echo, std::uint64_t seed,
                              const std::string& command) {
    nlohmann::json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = config_echo;
    j["config_hash"] = content_hash(config_echo);
    auto now = std::chrono::system_clock::now().time_since_epoch();
    j["timestamp_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    return j.dump(2) + "\n";
}

CsvWriter stability_curve_csv(const StabilityCurve& c) {
    CsvWriter w({"delta", "opnorm_proxy", "linf_rel", "linf_abs", "hminus1", "alpha"});
    for (const auto& r : c.rows)
        w.add_row({CsvWriter::num(r.delta), CsvWriter::num(r.opnorm),
                   CsvWriter::num(r.linf_rel), CsvWriter::num(r.linf_abs),
                   CsvWriter::num(r.hminus1), CsvWriter::num(r.alpha)});
    return w;
}

CsvWriter ray_samples_csv(const std::vector<RaySample>& samples,
                          const std::vector<double>& oracle_values) {
    CsvWriter w({"entry_row", "entry_col", "theta_x", "theta_y", "y_x", "y_y", "y3",
                 "eps", "rho", "value_re", "value_im", "oracle_value", "abs_err"});
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const RaySample& s = samples[i];
        double oracle = i < oracle_values.size() ? oracle_values[i] : 0.0;
        w.add_row({CsvWriter::num(s.row), CsvWriter::num(s.col), CsvWriter::num(s.theta.x),
                   CsvWriter::num(s.theta.y), CsvWriter::num(s.y.x), CsvWriter::num(s.y.y),
                   CsvWriter::num(s.y3), CsvWriter::num(s.eps), CsvWriter::num(s.rho),
                   CsvWriter::num(s.value.real()), CsvWriter::num(s.value.imag()),
                   CsvWriter::num(oracle), CsvWriter::num(std::abs(s.value - oracle))});
    }
    return w;
}

CsvWriter budget_csv(const ErrorBudget& b) {
    CsvWriter w({"stage", "linf_rel"});
    w.add_row({"total", CsvWriter::num(b.total)});
    w.add_row({"extraction", CsvWriter::num(b.extraction)});
    w.add_row({"slice_assembly", CsvWriter::num(b.slice_assembly)});
    w.add_row({"extrapolation", CsvWriter::num(b.extrapolation)});
    w.add_row({"cutoff_bias", CsvWriter::num(b.cutoff_bias)});
    w.add_row({"inversion_only", CsvWriter::num(b.inversion_only)});
    w.add_row({"stage_sum", CsvWriter::num(b.sum())});
    return w;
}

}  // namespace wginv

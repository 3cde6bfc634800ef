#pragma once

#include <string>
#include <vector>

#include "wginv/reconstruct.hpp"

namespace wginv {

/// Deterministic CSV writer: header row plus stringified cells; doubles are
/// rendered with %.17g so identical runs produce identical bytes.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(std::vector<std::string> cells);
    std::string str() const;
    void write(const std::string& path) const;

    static std::string num(double v);
    static std::string num(int v) { return std::to_string(v); }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Flat binary field dump (row-major little-endian float64) with a text
/// sidecar header carrying the shape.
void write_field_binary(const std::string& path, const SpatialField& f);
SpatialField read_field_binary(const std::string& path);
void write_slice_binary(const std::string& path, const SliceField& f);

/// Minimal SVG renderers: one polyline chart (log-log capable) and a
/// heatmap of a (t, x) slice.
std::string svg_line_chart(const std::vector<double>& x, const std::vector<double>& y,
                           const std::string& title, bool loglog);
std::string svg_heatmap(const SliceField& f, int t_index, const std::string& title);

/// Run manifest: config echo, content hash, timestamp (the only
/// non-deterministic artifact field).
std::string run_manifest_json(const std::string& config_echo, std::uint64_t seed,
                              const std::string& command);

/// FNV-1a content hash, hex-encoded.
std::string content_hash(const std::string& data);

/// CSV serializations of pipeline products.
CsvWriter stability_curve_csv(const StabilityCurve& c);
CsvWriter ray_samples_csv(const std::vector<RaySample>& samples,
                          const std::vector<double>& oracle_values);
CsvWriter budget_csv(const ErrorBudget& b);

}  // namespace wginv

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qulat/config.hpp"
#include "qulat/tebd.hpp"

namespace qulat {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Time-series CSV: first column t, then one column per entry of each row;
/// the header names the value columns.
void write_timeseries_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<std::vector<double>>& rows,
                          const std::vector<std::string>& value_headers);

void write_table_csv(const std::string& path, const std::vector<std::string>& headers,
                     const std::vector<std::vector<double>>& rows);

/// 8-bit grayscale PGM (P5 binary or P2 text): rows = time ascending
/// downward, values mapped linearly from [lo, hi] onto [0, 255]. When no
/// range is given it is set to the grid min/max, widened by +-0.5 if flat.
/// The exact mapping is recorded in the file comment line. NaNs and empty
/// grids are rejected.
void emit_heatmap(const std::vector<std::vector<double>>& grid, const std::string& path,
                  std::optional<std::pair<double, double>> range, bool binary = true);

/// Build/version string baked in at compile time.
std::string version_string();

std::vector<std::string> site_headers(int n, const std::string& prefix);
std::vector<std::string> grid_headers(const QumodeGrid& g);

}  // namespace qulat

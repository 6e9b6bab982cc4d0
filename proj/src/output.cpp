#include "qulat/output.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qulat {

namespace {

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw IoError("cannot write '" + path + "'");
  return os;
}

}  // namespace

void write_timeseries_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<std::vector<double>>& rows,
                          const std::vector<std::string>& value_headers) {
  if (times.size() != rows.size())
    throw std::invalid_argument("write_timeseries_csv: shape mismatch");
  auto os = open_out(path, false);
  os << "t";
  for (const auto& h : value_headers) os << "," << h;
  os << "\n";
  os << std::setprecision(17);
  for (size_t i = 0; i < times.size(); ++i) {
    os << times[i];
    for (double v : rows[i]) os << "," << v;
    os << "\n";
  }
  if (!os) throw IoError("write failed for '" + path + "'");
}

void write_table_csv(const std::string& path, const std::vector<std::string>& headers,
                     const std::vector<std::vector<double>>& rows) {
  auto os = open_out(path, false);
  for (size_t i = 0; i < headers.size(); ++i) os << (i ? "," : "") << headers[i];
  os << "\n" << std::setprecision(17);
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  if (!os) throw IoError("write failed for '" + path + "'");
}

void emit_heatmap(const std::vector<std::vector<double>>& grid, const std::string& path,
                  std::optional<std::pair<double, double>> range, bool binary) {
  if (grid.empty() || grid.front().empty())
    throw std::invalid_argument("emit_heatmap: empty grid");
  const size_t cols = grid.front().size();
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (const auto& row : grid) {
    if (row.size() != cols) throw std::invalid_argument("emit_heatmap: ragged grid");
    for (double v : row) {
      if (std::isnan(v)) throw std::invalid_argument("emit_heatmap: NaN in grid");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (range) {
    lo = range->first;
    hi = range->second;
  } else if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (!(hi > lo)) throw std::invalid_argument("emit_heatmap: empty value range");

  auto pixel = [&](double v) {
    long p = std::lround(255.0 * (v - lo) / (hi - lo));
    return static_cast<int>(std::clamp(p, 0l, 255l));
  };

  auto os = open_out(path, binary);
  os << (binary ? "P5" : "P2") << "\n";
  os << "# linear map [" << std::setprecision(17) << lo << ", " << hi
     << "] -> [0, 255], rows = time ascending downward\n";
  os << cols << " " << grid.size() << "\n255\n";
  if (binary) {
    std::string buf;
    buf.reserve(grid.size() * cols);
    for (const auto& row : grid)
      for (double v : row) buf.push_back(static_cast<char>(pixel(v)));
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  } else {
    for (const auto& row : grid) {
      for (size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << pixel(row[i]);
      os << "\n";
    }
  }
  if (!os) throw IoError("write failed for '" + path + "'");
}

std::string version_string() {
#ifdef QULAT_VERSION
  return QULAT_VERSION;
#else
  return "unversioned";
#endif
}

std::vector<std::string> site_headers(int n, const std::string& prefix) {
  std::vector<std::string> h;
  for (int i = 0; i < n; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

std::vector<std::string> grid_headers(const QumodeGrid& g) {
  std::vector<std::string> h;
  std::ostringstream os;
  for (int j = 0; j < g.d; ++j) {
    os.str("");
    os << "q=" << std::setprecision(10) << g.points[j];
    h.push_back(os.str());
  }
  return h;
}

}  // namespace qulat

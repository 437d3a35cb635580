#include "tilegp/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tilegp {

namespace {

double parse_cell(const std::string& cell, const std::string& path, int line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    std::ostringstream msg;
    msg << path << ":" << line << ": bad number '" << cell << "'";
    throw std::runtime_error(msg.str());
  }
  return v;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

}  // namespace

bool CsvTable::has_full_z() const {
  for (double v : z)
    if (std::isnan(v)) return false;
  return !z.empty();
}

LocationSet CsvTable::locations(const DistanceMetric& metric) const {
  LocationSet locs{xs, ys, metric};
  locs.validate();
  return locs;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z") throw std::runtime_error(path + ": expected header 'x,y,z'");

  CsvTable table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != 3) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": expected 3 columns, got " << cells.size();
      throw std::runtime_error(msg.str());
    }
    table.xs.push_back(parse_cell(cells[0], path, lineno));
    table.ys.push_back(parse_cell(cells[1], path, lineno));
    table.z.push_back(cells[2].empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : parse_cell(cells[2], path, lineno));
  }
  return table;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,y,z\n";
  for (int i = 0; i < table.rows(); ++i) {
    out << format_double(table.xs[i]) << ',' << format_double(table.ys[i]) << ',';
    if (!std::isnan(table.z[i])) out << format_double(table.z[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_prediction_csv(const std::string& path, const CsvTable& targets,
                          const std::vector<double>& mean, const std::vector<double>& variance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,y,z,mean,variance\n";
  for (int i = 0; i < targets.rows(); ++i) {
    out << format_double(targets.xs[i]) << ',' << format_double(targets.ys[i]) << ',';
    if (!std::isnan(targets.z[i])) out << format_double(targets.z[i]);
    out << ',' << format_double(mean[i]) << ',' << format_double(variance[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tilegp

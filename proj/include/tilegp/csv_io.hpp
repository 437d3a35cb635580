#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tilegp/geometry.hpp"

namespace tilegp {

/// One location/data file: header `x,y,z`, one row per location. z cells may
/// be empty (prediction targets); missing values are stored as NaN.
struct CsvTable {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> z;  // NaN where the cell was empty
  int rows() const { return static_cast<int>(xs.size()); }
  bool has_full_z() const;

  LocationSet locations(const DistanceMetric& metric) const;
};

CsvTable read_csv(const std::string& path);

/// Writes x,y,z (z cell left empty where NaN). Numbers are printed with
/// shortest round-trip decimal formatting, so re-reading reproduces the
/// doubles bit for bit.
void write_csv(const std::string& path, const CsvTable& table);

/// Same file with `mean,variance` columns appended (the predict output).
void write_prediction_csv(const std::string& path, const CsvTable& targets,
                          const std::vector<double>& mean, const std::vector<double>& variance);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace tilegp

#pragma once

#include <cmath>
#include <vector>

#include "tilegp/rng.hpp"
#include "tilegp/tiled_matrix.hpp"

namespace testutil {

/// Lower-triangular tile grid from a dense row-major symmetric matrix.
inline tilegp::TiledMatrix tiled_from_dense(const std::vector<double>& a, int n, int ts) {
  tilegp::TiledMatrix m(tilegp::TileLayout(n, ts), tilegp::ComputeMode::Exact);
  const auto& lay = m.layout();
  for (int i = 0; i < lay.nt; ++i) {
    for (int j = 0; j <= i; ++j) {
      tilegp::Tile& t = m.tile(i, j);
      for (int r = 0; r < t.rows; ++r)
        for (int c = 0; c < t.cols; ++c)
          t.a[static_cast<std::size_t>(r) * t.cols + c] =
              a[static_cast<std::size_t>(lay.offset(i) + r) * n + lay.offset(j) + c];
    }
  }
  return m;
}

/// Well-conditioned random SPD matrix: M M^T + n I.
inline std::vector<double> random_spd(int n, std::uint64_t seed) {
  tilegp::SplitMix64 rng(seed);
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (double& v : m) v = 2.0 * rng.next_uniform() - 1.0;
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += m[static_cast<std::size_t>(i) * n + k] * m[static_cast<std::size_t>(j) * n + k];
      a[static_cast<std::size_t>(i) * n + j] = s + (i == j ? n : 0.0);
    }
  return a;
}

inline double frob_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

inline double frob_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace testutil

#pragma once

// Internal helpers shared by the factorization translation units: Eigen views
// over tile storage and the dependency-graph skeleton of the right-looking
// tiled Cholesky.

#include <Eigen/Dense>
#include <functional>

#include "tilegp/errors.hpp"
#include "tilegp/task_pool.hpp"
#include "tilegp/tiled_matrix.hpp"

namespace tilegp::detail {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

inline MapMat map_dense(Tile& t) { return {t.a.data(), t.rows, t.cols}; }
inline ConstMapMat map_dense(const Tile& t) { return {t.a.data(), t.rows, t.cols}; }
inline MapMat map_u(Tile& t) { return {t.a.data(), t.rows, t.rank}; }
inline ConstMapMat map_u(const Tile& t) { return {t.a.data(), t.rows, t.rank}; }
inline MapMat map_v(Tile& t) { return {t.b.data(), t.rank, t.cols}; }
inline ConstMapMat map_v(const Tile& t) { return {t.b.data(), t.rank, t.cols}; }

/// Unblocked in-tile Cholesky on the lower triangle; zeroes the strict upper
/// part so densified factors are clean.
inline void potrf_tile(Tile& t, int tile_index) {
  const int m = t.rows;
  double* a = t.a.data();
  for (int j = 0; j < m; ++j) {
    double s = a[static_cast<std::size_t>(j) * m + j];
    for (int k = 0; k < j; ++k) s -= a[static_cast<std::size_t>(j) * m + k] * a[static_cast<std::size_t>(j) * m + k];
    if (!(s > 0.0)) {
      throw SingularityError("cholesky: nonpositive pivot in diagonal tile " + std::to_string(tile_index) +
                                 " (local row " + std::to_string(j) + "): system is computationally singular",
                             tile_index);
    }
    const double d = std::sqrt(s);
    a[static_cast<std::size_t>(j) * m + j] = d;
    for (int i = j + 1; i < m; ++i) {
      double v = a[static_cast<std::size_t>(i) * m + j];
      for (int k = 0; k < j; ++k) v -= a[static_cast<std::size_t>(i) * m + k] * a[static_cast<std::size_t>(j) * m + k];
      a[static_cast<std::size_t>(i) * m + j] = v / d;
    }
  }
  for (int r = 0; r < m; ++r)
    for (int c = r + 1; c < m; ++c) a[static_cast<std::size_t>(r) * m + c] = 0.0;
}

/// B <- B * Lkk^-T (the triangular-solve task applied to a dense block).
inline void trsm_tile(const Tile& diag, MapMat block) {
  map_dense(diag).transpose().triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(block);
}

struct FactorCallbacks {
  std::function<void(int)> potrf;             // diagonal tile k
  std::function<void(int, int)> trsm;         // tile (i,k), i > k
  std::function<void(int, int, int)> update;  // tile (i,j) -= L(i,k) L(j,k)^T, k < j <= i
  std::function<bool(int, int)> is_zero;      // structural zero (never scheduled)
};

/// Builds and runs the right-looking factorization DAG. Writes to a tile are
/// chained in ascending step order, which pins the floating-point result
/// independently of scheduling.
inline void run_factor_dag(int nt, WorkerPool& pool, const FactorCallbacks& cb) {
  TaskGraph g;
  std::vector<int> last(static_cast<std::size_t>(nt) * nt, -1);
  auto writer = [&](int i, int j) -> int& { return last[static_cast<std::size_t>(i) * nt + j]; };

  for (int k = 0; k < nt; ++k) {
    const int pk = g.add([&cb, k] { cb.potrf(k); });
    g.add_dependency(pk, writer(k, k));
    writer(k, k) = pk;
    for (int i = k + 1; i < nt; ++i) {
      if (cb.is_zero(i, k)) continue;
      const int ti = g.add([&cb, i, k] { cb.trsm(i, k); });
      g.add_dependency(ti, pk);
      g.add_dependency(ti, writer(i, k));
      writer(i, k) = ti;
    }
    for (int i = k + 1; i < nt; ++i) {
      if (cb.is_zero(i, k)) continue;
      for (int j = k + 1; j <= i; ++j) {
        if (cb.is_zero(j, k) || cb.is_zero(i, j)) continue;
        const int u = g.add([&cb, i, j, k] { cb.update(i, j, k); });
        g.add_dependency(u, writer(i, k));
        if (j != i) g.add_dependency(u, writer(j, k));
        g.add_dependency(u, writer(i, j));
        writer(i, j) = u;
      }
    }
  }
  pool.run(g);
}

}  // namespace tilegp::detail

#include "tilegp/cholesky.hpp"

#include <cmath>
#include <stdexcept>

#include "tile_kernels.hpp"

namespace tilegp {

using detail::ConstMapMat;
using detail::map_dense;
using detail::map_u;
using detail::map_v;
using detail::MapMat;

void cholesky_in_place(TiledMatrix& matrix, WorkerPool& pool) {
  if (matrix.mode() == ComputeMode::Tlr)
    throw std::invalid_argument("cholesky_in_place: use tlr_cholesky for compressed matrices");
  const int nt = matrix.layout().nt;
  const int bw = matrix.dst_bandwidth();
  const bool dst = matrix.mode() == ComputeMode::Dst;

  detail::FactorCallbacks cb;
  cb.is_zero = [dst, bw](int i, int j) { return dst && (i - j > bw); };
  cb.potrf = [&matrix](int k) { detail::potrf_tile(matrix.tile(k, k), k); };
  cb.trsm = [&matrix](int i, int k) { detail::trsm_tile(matrix.tile(k, k), map_dense(matrix.tile(i, k))); };
  cb.update = [&matrix](int i, int j, int k) {
    const Tile& lik = matrix.tile(i, k);
    Tile& c = matrix.tile(i, j);
    if (i == j) {
      map_dense(c).selfadjointView<Eigen::Lower>().rankUpdate(map_dense(lik), -1.0);
    } else {
      map_dense(c).noalias() -= map_dense(lik) * map_dense(matrix.tile(j, k)).transpose();
    }
  };
  detail::run_factor_dag(nt, pool, cb);
}

namespace {

// y_i -= T y_j for the three tile variants (forward sweep).
void apply_tile(const Tile& t, const double* yj, double* yi) {
  if (t.kind == TileKind::Zero) return;
  Eigen::Map<const Eigen::VectorXd> x(yj, t.cols);
  Eigen::Map<Eigen::VectorXd> y(yi, t.rows);
  if (t.kind == TileKind::Dense) {
    y.noalias() -= map_dense(t) * x;
  } else {
    y.noalias() -= map_u(t) * (map_v(t) * x);
  }
}

// x_i -= T^T x_j (backward sweep, T stored at (j,i) with j > i).
void apply_tile_transposed(const Tile& t, const double* xj, double* xi) {
  if (t.kind == TileKind::Zero) return;
  Eigen::Map<const Eigen::VectorXd> x(xj, t.rows);
  Eigen::Map<Eigen::VectorXd> y(xi, t.cols);
  if (t.kind == TileKind::Dense) {
    y.noalias() -= map_dense(t).transpose() * x;
  } else {
    y.noalias() -= map_v(t).transpose() * (map_u(t).transpose() * x);
  }
}

void solve_diag_forward(const Tile& t, double* y) {
  const int m = t.rows;
  const double* a = t.a.data();
  for (int r = 0; r < m; ++r) {
    double s = y[r];
    for (int c = 0; c < r; ++c) s -= a[static_cast<std::size_t>(r) * m + c] * y[c];
    const double d = a[static_cast<std::size_t>(r) * m + r];
    if (d == 0.0) throw SingularityError("solve_triangular: zero diagonal element", -1);
    y[r] = s / d;
  }
}

void solve_diag_backward(const Tile& t, double* y) {
  const int m = t.rows;
  const double* a = t.a.data();
  for (int r = m - 1; r >= 0; --r) {
    double s = y[r];
    for (int c = r + 1; c < m; ++c) s -= a[static_cast<std::size_t>(c) * m + r] * y[c];
    const double d = a[static_cast<std::size_t>(r) * m + r];
    if (d == 0.0) throw SingularityError("solve_triangular: zero diagonal element", -1);
    y[r] = s / d;
  }
}

}  // namespace

std::vector<double> solve_triangular(const TiledMatrix& L, std::span<const double> b, TriangularSide side) {
  const TileLayout& lay = L.layout();
  if (static_cast<int>(b.size()) != lay.n) throw std::invalid_argument("solve_triangular: size mismatch");
  std::vector<double> y(b.begin(), b.end());

  if (side == TriangularSide::Forward) {
    for (int i = 0; i < lay.nt; ++i) {
      double* yi = y.data() + lay.offset(i);
      for (int j = 0; j < i; ++j) apply_tile(L.tile(i, j), y.data() + lay.offset(j), yi);
      solve_diag_forward(L.tile(i, i), yi);
    }
  } else {
    for (int i = lay.nt - 1; i >= 0; --i) {
      double* xi = y.data() + lay.offset(i);
      for (int j = i + 1; j < lay.nt; ++j) apply_tile_transposed(L.tile(j, i), y.data() + lay.offset(j), xi);
      solve_diag_backward(L.tile(i, i), xi);
    }
  }
  return y;
}

double log_det_from_factor(const TiledMatrix& L) {
  const TileLayout& lay = L.layout();
  double acc = 0.0;
  for (int i = 0; i < lay.nt; ++i) {
    const Tile& t = L.tile(i, i);
    for (int r = 0; r < t.rows; ++r) {
      const double d = t.a[static_cast<std::size_t>(r) * t.cols + r];
      if (!(d > 0.0)) throw SingularityError("log_det_from_factor: nonpositive diagonal", i);
      acc += std::log(d);
    }
  }
  return 2.0 * acc;
}

}  // namespace tilegp

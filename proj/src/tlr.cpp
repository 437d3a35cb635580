#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tile_kernels.hpp"
#include "tilegp/cholesky.hpp"

namespace tilegp {

using detail::ConstMapMat;
using detail::map_dense;
using detail::map_u;
using detail::map_v;
using detail::RowMat;

namespace {

// Smallest rank r >= 1 whose discarded tail satisfies
// sqrt(sum_{i>=r} sv_i^2) <= accuracy * ||sv||_2.
int truncation_rank(const Eigen::VectorXd& sv, double accuracy) {
  const int m = static_cast<int>(sv.size());
  const double budget2 = accuracy * accuracy * sv.squaredNorm();
  int rank = m;
  double tail2 = 0.0;
  for (int i = m - 1; i >= 1; --i) {
    tail2 += sv[i] * sv[i];
    if (tail2 <= budget2)
      rank = i;
    else
      break;
  }
  return rank;
}

void set_lowrank(Tile& t, const RowMat& u, const RowMat& v, int rank) {
  t.kind = TileKind::LowRank;
  t.rank = rank;
  t.a.assign(u.data(), u.data() + u.size());
  t.b.assign(v.data(), v.data() + v.size());
}

// tile ~ U*V with U carrying the singular values.
void compress_dense_tile(Tile& t, double accuracy) {
  Eigen::BDCSVD<RowMat> svd(map_dense(t), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int rank = truncation_rank(svd.singularValues(), accuracy);
  const RowMat u = svd.matrixU().leftCols(rank) * svd.singularValues().head(rank).asDiagonal();
  const RowMat v = svd.matrixV().leftCols(rank).transpose();
  set_lowrank(t, u, v, rank);
}

// Recompress U*V (ranks already stacked) back to the tile accuracy.
void recompress(Tile& t, const RowMat& u, const RowMat& v, double accuracy) {
  const int kq = std::min<int>(u.rows(), u.cols());
  Eigen::HouseholderQR<RowMat> qru(u);
  const RowMat qu = qru.householderQ() * RowMat::Identity(u.rows(), kq);
  const RowMat ru = qru.matrixQR().topRows(kq).triangularView<Eigen::Upper>();

  const RowMat vt = v.transpose();
  const int kv = std::min<int>(vt.rows(), vt.cols());
  Eigen::HouseholderQR<RowMat> qrv(vt);
  const RowMat qv = qrv.householderQ() * RowMat::Identity(vt.rows(), kv);
  const RowMat rv = qrv.matrixQR().topRows(kv).triangularView<Eigen::Upper>();

  const RowMat core = ru * rv.transpose();
  Eigen::BDCSVD<RowMat> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int rank = truncation_rank(svd.singularValues(), accuracy);
  const RowMat nu = qu * (svd.matrixU().leftCols(rank) * svd.singularValues().head(rank).asDiagonal());
  const RowMat nv = (qv * svd.matrixV().leftCols(rank)).transpose();
  set_lowrank(t, nu, nv, rank);
}

}  // namespace

TiledMatrix tlr_compress_impl(const TiledMatrix& exact, double accuracy, WorkerPool& pool) {
  TiledMatrix out = exact;
  out.mode_ = ComputeMode::Tlr;
  out.tlr_accuracy_ = accuracy;
  const int nt = out.layout().nt;
  std::vector<std::pair<int, int>> offdiag;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < i; ++j) offdiag.emplace_back(i, j);
  pool.parallel_for(0, static_cast<int>(offdiag.size()), [&](int lo, int hi) {
    for (int idx = lo; idx < hi; ++idx)
      compress_dense_tile(out.tile(offdiag[idx].first, offdiag[idx].second), accuracy);
  });
  return out;
}

TiledMatrix tlr_compress(const TiledMatrix& exact, double accuracy, WorkerPool& pool) {
  if (exact.mode() != ComputeMode::Exact)
    throw std::invalid_argument("tlr_compress: input must be an exact (dense-tile) matrix");
  if (!(accuracy > 0.0)) throw std::invalid_argument("tlr_compress: accuracy must be positive");
  return tlr_compress_impl(exact, accuracy, pool);
}

void tlr_cholesky(TiledMatrix& matrix, WorkerPool& pool) {
  if (matrix.mode() != ComputeMode::Tlr)
    throw std::invalid_argument("tlr_cholesky: matrix is not TLR-compressed");
  const double accuracy = matrix.tlr_accuracy();

  detail::FactorCallbacks cb;
  cb.is_zero = [](int, int) { return false; };
  cb.potrf = [&matrix](int k) { detail::potrf_tile(matrix.tile(k, k), k); };
  cb.trsm = [&matrix](int i, int k) {
    Tile& t = matrix.tile(i, k);
    auto v = map_v(t);
    detail::trsm_tile(matrix.tile(k, k), v);
  };
  cb.update = [&matrix, accuracy](int i, int j, int k) {
    const Tile& lik = matrix.tile(i, k);
    if (i == j) {
      // diagonal: dense -= U (V V^T) U^T
      Tile& c = matrix.tile(i, i);
      const RowMat w = map_v(lik) * map_v(lik).transpose();
      map_dense(c).noalias() -= (map_u(lik) * w) * map_u(lik).transpose();
      return;
    }
    const Tile& ljk = matrix.tile(j, k);
    Tile& c = matrix.tile(i, j);
    // L(i,k) L(j,k)^T = U_i (V_i V_j^T) U_j^T: stack onto the existing factors
    // and recompress.
    const RowMat p = map_u(lik) * (map_v(lik) * map_v(ljk).transpose());
    RowMat u_aug(c.rows, c.rank + ljk.rank);
    u_aug.leftCols(c.rank) = map_u(c);
    u_aug.rightCols(ljk.rank) = -p;
    RowMat v_aug(c.rank + ljk.rank, c.cols);
    v_aug.topRows(c.rank) = map_v(c);
    v_aug.bottomRows(ljk.rank) = map_u(ljk).transpose();
    recompress(c, u_aug, v_aug, accuracy);
  };
  detail::run_factor_dag(matrix.layout().nt, pool, cb);
}

}  // namespace tilegp

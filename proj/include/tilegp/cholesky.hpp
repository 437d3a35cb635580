#pragma once

#include <span>
#include <vector>

#include "tilegp/task_pool.hpp"
#include "tilegp/tiled_matrix.hpp"

namespace tilegp {

/// Right-looking tiled Cholesky, in place: on return the lower tile grid
/// holds L with L L^T = A (Exact) or the truncated matrix (Dst). The task
/// DAG has the usual four kinds (factor-diagonal, triangular-solve,
/// symmetric-rank-update, general-update); updates to one tile are chained
/// in step order, so the factor is bitwise reproducible for any worker
/// count. Throws SingularityError naming the diagonal tile that failed.
void cholesky_in_place(TiledMatrix& matrix, WorkerPool& pool);

/// Replaces every off-diagonal tile with its truncated SVD: the smallest
/// rank whose discarded singular-value tail satisfies
/// ||tail||_F <= accuracy * ||tile||_F, never less than rank 1.
TiledMatrix tlr_compress(const TiledMatrix& exact, double accuracy, WorkerPool& pool);

/// Tiled Cholesky over the compressed representation. Low-rank products stay
/// in factored form; low-rank sums are recompressed to the tile accuracy by
/// QR of the stacked factors followed by an SVD of the small core.
void tlr_cholesky(TiledMatrix& matrix, WorkerPool& pool);

enum class TriangularSide { Forward, Backward };

/// Forward solves L y = b, Backward solves L^T x = b against the stored
/// (possibly truncated or compressed) factor.
std::vector<double> solve_triangular(const TiledMatrix& factor, std::span<const double> b,
                                     TriangularSide side);

/// 2 * sum log L_ii, accumulated left to right for reproducibility.
double log_det_from_factor(const TiledMatrix& factor);

}  // namespace tilegp

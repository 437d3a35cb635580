#pragma once

#include <vector>

#include "tilegp/geometry.hpp"
#include "tilegp/task_pool.hpp"
#include "tilegp/tiled_matrix.hpp"

namespace tilegp {

/// Matern covariance parameters theta = (sigma^2, beta, nu): variance,
/// spatial range (same units as distance) and smoothness. All strictly
/// positive.
struct MaternParams {
  double sigma_sq = 1.0;
  double beta = 0.1;
  double nu = 0.5;

  void validate() const;
};

/// Box constraints for the parameter search (the clb/cub vectors).
struct ParamBounds {
  std::vector<double> lower{0.001, 0.001, 0.001};
  std::vector<double> upper{5.0, 5.0, 5.0};

  void validate() const;
};

struct BesselKResult {
  double value = 0.0;
  bool underflowed = false;  // true when K_nu(x) underflows double precision
};

/// Modified Bessel function of the second kind, real order nu > 0, x > 0.
/// Temme's series below x = 2, Thompson-Barnett continued fraction above,
/// upward recurrence in the order. Relative error stays below 1e-12 for
/// nu in (0, 10] and x in [1e-8, 700].
BesselKResult bessel_k_ex(double nu, double x);

/// As bessel_k_ex but returns just the value (0 on underflow).
double bessel_k(double nu, double x);

/// Scalar Matern covariance at distance d. Returns sigma^2 at d = 0 (the
/// limit value) and exactly 0 once d/beta exceeds 700, where K_nu underflows.
double matern(double d, const MaternParams& params);

/// Matern kernel with the order-dependent constants precomputed, for the
/// covariance assembly loops where nu is fixed across millions of distances.
class MaternEvaluator {
 public:
  explicit MaternEvaluator(const MaternParams& params);
  double operator()(double d) const;
  const MaternParams& params() const { return params_; }

 private:
  MaternParams params_;
  double inv_beta_;
  double front_;  // sigma^2 * 2^(1-nu) / Gamma(nu)
  // order reduction nu = mu + m, |mu| <= 1/2, plus the mu-only Temme terms
  int m_;
  double mu_, mu2_, g1_, g2_, fc_, p0_, q0_;

  friend BesselKResult bessel_k_ex(double nu, double x);
  double kv(double x) const;  // K_nu(x), 0 on underflow
};

/// Builds the lower tile grid of the Matern covariance matrix
/// Sigma_ij = matern(distance(s_i, s_j)). Tiles are filled by independent
/// parallel tasks; each entry is computed once (diagonal tiles mirrored in
/// place), so the result is exactly symmetric. Coincident distinct locations
/// raise the duplicate warning on the returned matrix.
TiledMatrix assemble_covariance(const LocationSet& locs, const MaternParams& params,
                                const TileLayout& layout, WorkerPool& pool);

}  // namespace tilegp

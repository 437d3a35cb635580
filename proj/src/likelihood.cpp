#include "tilegp/likelihood.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tilegp/cholesky.hpp"
#include "tilegp/errors.hpp"

namespace tilegp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

void GaussianField::validate() const {
  locs.validate();
  if (z.size() != static_cast<std::size_t>(locs.count()))
    throw std::invalid_argument("GaussianField: z length does not match locations");
  for (double v : z)
    if (!std::isfinite(v)) throw std::invalid_argument("GaussianField: non-finite observation");
}

void ComputeBackend::validate() const {
  if (workers < 1) throw std::invalid_argument("ComputeBackend: workers must be >= 1");
  if (tile_size < 1) throw std::invalid_argument("ComputeBackend: tile_size must be >= 1");
  if (mode == ComputeMode::Dst && dst_bandwidth < 0)
    throw std::invalid_argument("ComputeBackend: bandwidth must be >= 0");
  if (mode == ComputeMode::Tlr && !(tlr_accuracy > 0.0))
    throw std::invalid_argument("ComputeBackend: tlr_accuracy must be positive");
}

double log_likelihood(const GaussianField& field, const MaternParams& params,
                      const ComputeBackend& backend, WorkerPool& pool) {
  field.validate();
  backend.validate();
  const int n = field.locs.count();
  const TileLayout layout(n, backend.tile_size);

  try {
    TiledMatrix cov = assemble_covariance(field.locs, params, layout, pool);
    if (backend.mode == ComputeMode::Dst) {
      cov = dst_truncate(std::move(cov), backend.dst_bandwidth);
      cholesky_in_place(cov, pool);
    } else if (backend.mode == ComputeMode::Tlr) {
      cov = tlr_compress(cov, backend.tlr_accuracy, pool);
      tlr_cholesky(cov, pool);
    } else {
      cholesky_in_place(cov, pool);
    }
    const double logdet = log_det_from_factor(cov);
    const std::vector<double> y = solve_triangular(cov, field.z, TriangularSide::Forward);
    // fixed left-to-right accumulation keeps the value reproducible
    double quad = 0.0;
    for (double v : y) quad += v * v;
    return -0.5 * n * kLog2Pi - 0.5 * logdet - 0.5 * quad;
  } catch (const SingularityError& e) {
    std::ostringstream msg;
    msg << e.what() << " [sigma_sq=" << params.sigma_sq << " beta=" << params.beta
        << " nu=" << params.nu << "]";
    throw SingularityError(msg.str(), e.tile_index());
  }
}

double log_likelihood(const GaussianField& field, const MaternParams& params,
                      const ComputeBackend& backend) {
  WorkerPool pool(backend.workers);
  return log_likelihood(field, params, backend, pool);
}

FitResult fit_mle(const GaussianField& field, const ParamBounds& bounds, const OptimizerConfig& opt,
                  const ComputeBackend& backend) {
  field.validate();
  bounds.validate();
  backend.validate();

  OptimizerConfig cfg = opt;
  if (cfg.lower.empty()) cfg.lower = bounds.lower;
  if (cfg.upper.empty()) cfg.upper = bounds.upper;
  if (cfg.lower != bounds.lower || cfg.upper != bounds.upper)
    throw std::invalid_argument("fit_mle: optimizer box disagrees with parameter bounds");

  WorkerPool pool(backend.workers);
  const auto objective = [&](std::span<const double> theta) -> double {
    const MaternParams p{theta[0], theta[1], theta[2]};
    try {
      return log_likelihood(field, p, backend, pool);
    } catch (const SingularityError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  const auto t0 = std::chrono::steady_clock::now();
  OptTrace trace;
  try {
    trace = maximize(objective, cfg);
  } catch (const OptimizationError& e) {
    throw FitError(std::string("fit_mle: ") + e.what() +
                       " (covariance singular across the whole search box?)",
                   e.trace);
  }
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;

  FitResult result;
  result.params = MaternParams{trace.best_point[0], trace.best_point[1], trace.best_point[2]};
  result.log_lik = trace.best_value;
  result.iterations = trace.iterations;
  result.total_time = wall.count();
  const double obj_time = std::accumulate(trace.per_eval_times.begin(), trace.per_eval_times.end(), 0.0);
  result.time_per_iter = trace.iterations > 0 ? obj_time / trace.iterations : 0.0;
  result.trace = std::move(trace);
  return result;
}

DetrendResult detrend_linear(const LocationSet& locs, std::span<const double> z) {
  locs.validate();
  const int n = locs.count();
  if (static_cast<int>(z.size()) != n) throw std::invalid_argument("detrend_linear: size mismatch");
  if (n < 3) throw std::invalid_argument("detrend_linear: need at least 3 observations");

  Eigen::MatrixXd x(n, 3);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = locs.xs[i];
    x(i, 2) = locs.ys[i];
  }
  Eigen::Map<const Eigen::VectorXd> zv(z.data(), n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < 3) throw std::invalid_argument("detrend_linear: collinear coordinates (rank-deficient design)");
  const Eigen::Vector3d beta = qr.solve(zv);
  Eigen::VectorXd resid = zv - x * beta;

  DetrendResult out;
  out.coefficients = {beta[0], beta[1], beta[2]};
  out.residuals.assign(resid.data(), resid.data() + n);
  return out;
}

}  // namespace tilegp

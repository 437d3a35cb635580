#include "tilegp/kriging.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "tilegp/cholesky.hpp"
#include "tilegp/errors.hpp"

namespace tilegp {

namespace {
constexpr double kVarianceSlack = 1e-10;
}

KrigingResult krige(const GaussianField& observed, const LocationSet& targets,
                    const MaternParams& params, const ComputeBackend& backend) {
  observed.validate();
  targets.validate();
  params.validate();
  backend.validate();
  if (!(targets.metric == observed.locs.metric))
    throw std::invalid_argument("krige: targets and observations use different distance metrics");

  const int n = observed.locs.count();
  const int m = targets.count();
  WorkerPool pool(backend.workers);
  const TileLayout layout(n, backend.tile_size);

  TiledMatrix cov = assemble_covariance(observed.locs, params, layout, pool);
  if (backend.mode == ComputeMode::Dst) {
    cov = dst_truncate(std::move(cov), backend.dst_bandwidth);
    cholesky_in_place(cov, pool);
  } else if (backend.mode == ComputeMode::Tlr) {
    cov = tlr_compress(cov, backend.tlr_accuracy, pool);
    tlr_cholesky(cov, pool);
  } else {
    cholesky_in_place(cov, pool);
  }

  const std::vector<double> w =
      solve_triangular(cov, solve_triangular(cov, observed.z, TriangularSide::Forward),
                       TriangularSide::Backward);

  const MaternEvaluator kernel(params);
  const bool sphere = observed.locs.metric.kind == MetricKind::GreatCircle;
  const double radius = observed.locs.metric.sphere_radius;

  KrigingResult out;
  out.mean.resize(m);
  out.variance.resize(m);

  // Per-target solves are independent, so a permutation of the targets
  // permutes the outputs bit for bit.
  std::atomic<bool> breakdown{false};
  pool.parallel_for(0, m, [&](int lo, int hi) {
    std::vector<double> c(n);
    for (int t = lo; t < hi; ++t) {
      const double tx = targets.xs[t];
      const double ty = targets.ys[t];
      for (int i = 0; i < n; ++i) {
        const double d = sphere ? detail::dist_haversine_deg(observed.locs.xs[i], observed.locs.ys[i],
                                                             tx, ty, radius)
                                : detail::dist_euclidean(observed.locs.xs[i], observed.locs.ys[i], tx, ty);
        c[i] = kernel(d);
      }
      double mu = 0.0;
      for (int i = 0; i < n; ++i) mu += c[i] * w[i];
      const std::vector<double> y = solve_triangular(cov, c, TriangularSide::Forward);
      double q = 0.0;
      for (double v : y) q += v * v;
      double var = params.sigma_sq - q;
      if (var < 0.0) {
        if (var < -kVarianceSlack) breakdown.store(true, std::memory_order_relaxed);
        var = 0.0;
      }
      out.mean[t] = mu;
      out.variance[t] = var;
    }
  });
  if (breakdown.load())
    throw SingularityError("krige: conditional variance below -1e-10, numerical breakdown", -1);
  return out;
}

KrigingResult krige_with_trend(const LocationSet& observed_locs, std::span<const double> observed_z,
                               const LocationSet& targets, const MaternParams& params,
                               const std::array<double, 3>& trend, const ComputeBackend& backend) {
  observed_locs.validate();
  if (static_cast<int>(observed_z.size()) != observed_locs.count())
    throw std::invalid_argument("krige_with_trend: size mismatch");

  GaussianField residual_field;
  residual_field.locs = observed_locs;
  residual_field.z.resize(observed_z.size());
  for (int i = 0; i < observed_locs.count(); ++i)
    residual_field.z[i] =
        observed_z[i] - (trend[0] + trend[1] * observed_locs.xs[i] + trend[2] * observed_locs.ys[i]);
  residual_field.trend = trend;

  KrigingResult out = krige(residual_field, targets, params, backend);
  for (int t = 0; t < targets.count(); ++t)
    out.mean[t] += trend[0] + trend[1] * targets.xs[t] + trend[2] * targets.ys[t];
  out.trend_added = true;
  return out;
}

}  // namespace tilegp

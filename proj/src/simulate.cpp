#include "tilegp/simulate.hpp"

#include <Eigen/Dense>

#include "tilegp/cholesky.hpp"
#include "tilegp/rng.hpp"

namespace tilegp {

GaussianField simulate_at(const SimulationSpec& spec) {
  spec.locs.validate();
  spec.params.validate();
  spec.backend.validate();
  const int n = spec.locs.count();

  SplitMix64 noise(split_stream(spec.seed, 1));
  std::vector<double> e(n);
  for (double& v : e) v = next_standard_normal(noise);

  WorkerPool pool(spec.backend.workers);
  const TileLayout layout(n, spec.backend.tile_size);
  TiledMatrix cov = assemble_covariance(spec.locs, spec.params, layout, pool);
  cholesky_in_place(cov, pool);

  // z_i = sum_{j<=i} L(i,j) e_j, tile rows independent, in-row order fixed.
  std::vector<double> z(n, 0.0);
  pool.parallel_for(0, layout.nt, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      Eigen::Map<Eigen::VectorXd> zi(z.data() + layout.offset(i), layout.tile_dim(i));
      for (int j = 0; j <= i; ++j) {
        const Tile& t = cov.tile(i, j);
        Eigen::Map<const Eigen::VectorXd> ej(e.data() + layout.offset(j), t.cols);
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
            t.a.data(), t.rows, t.cols);
        if (i == j)
          zi.noalias() += m.triangularView<Eigen::Lower>() * ej;
        else
          zi.noalias() += m * ej;
      }
    }
  });

  return GaussianField{spec.locs, std::move(z), std::nullopt};
}

GaussianField simulate_random(int n, const MaternParams& params, const DistanceMetric& metric,
                              std::uint64_t seed, const ComputeBackend& backend) {
  LocationSet locs = random_locations(n, seed);
  locs.metric = metric;
  locs.validate();
  return simulate_at(SimulationSpec{params, std::move(locs), seed, backend});
}

}  // namespace tilegp

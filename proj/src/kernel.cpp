#include "tilegp/kernel.hpp"

#include <atomic>
#include <stdexcept>
#include <vector>

namespace tilegp {

TiledMatrix assemble_covariance(const LocationSet& locs, const MaternParams& params,
                                const TileLayout& layout, WorkerPool& pool) {
  locs.validate();
  if (locs.count() != layout.n) throw std::invalid_argument("assemble_covariance: layout/location size mismatch");
  const MaternEvaluator kernel(params);
  const bool sphere = locs.metric.kind == MetricKind::GreatCircle;
  const double radius = locs.metric.sphere_radius;
  const double* xs = locs.xs.data();
  const double* ys = locs.ys.data();

  TiledMatrix a(layout, ComputeMode::Exact);
  std::atomic<bool> duplicate{false};

  const int nt = layout.nt;
  std::vector<std::pair<int, int>> blocks;
  blocks.reserve(static_cast<std::size_t>(nt) * (nt + 1) / 2);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j <= i; ++j) blocks.emplace_back(i, j);

  pool.parallel_for(0, static_cast<int>(blocks.size()), [&](int lo, int hi) {
    for (int idx = lo; idx < hi; ++idx) {
      const auto [i, j] = blocks[idx];
      Tile& t = a.tile(i, j);
      const int r0 = layout.offset(i);
      const int c0 = layout.offset(j);
      for (int r = 0; r < t.rows; ++r) {
        const int gr = r0 + r;
        const int cmax = (i == j) ? r + 1 : t.cols;
        for (int c = 0; c < cmax; ++c) {
          const int gc = c0 + c;
          double d;
          if (gr == gc) {
            d = 0.0;
          } else {
            d = sphere ? detail::dist_haversine_deg(xs[gr], ys[gr], xs[gc], ys[gc], radius)
                       : detail::dist_euclidean(xs[gr], ys[gr], xs[gc], ys[gc]);
            if (d == 0.0) duplicate.store(true, std::memory_order_relaxed);
          }
          const double v = kernel(d);
          t.a[static_cast<std::size_t>(r) * t.cols + c] = v;
          if (i == j && c != r) t.a[static_cast<std::size_t>(c) * t.cols + r] = v;
        }
      }
    }
  });

  if (duplicate.load()) a.set_duplicate_warning();
  return a;
}

}  // namespace tilegp

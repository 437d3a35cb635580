#pragma once

#include <cstdint>

#include "tilegp/likelihood.hpp"

namespace tilegp {

struct SimulationSpec {
  MaternParams params;
  LocationSet locs;
  std::uint64_t seed = 0;
  ComputeBackend backend;  // only workers and tile_size matter: the factor is always exact
};

/// Draws one realization z = L e at the given locations, where L is the
/// exact Cholesky factor of the Matern covariance and e is the stream-1
/// standard normal vector of the seed. Deterministic per
/// (seed, locations, params).
GaussianField simulate_at(const SimulationSpec& spec);

/// Composes random_locations(n, seed) (stream 0) with simulate_at (noise on
/// stream 1): one seed drives both draws through the documented split.
GaussianField simulate_random(int n, const MaternParams& params, const DistanceMetric& metric,
                              std::uint64_t seed, const ComputeBackend& backend);

}  // namespace tilegp

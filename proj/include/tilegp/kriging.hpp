#pragma once

#include <array>
#include <span>

#include "tilegp/likelihood.hpp"

namespace tilegp {

struct KrigingResult {
  std::vector<double> mean;
  std::vector<double> variance;
  bool trend_added = false;
};

/// Simple (zero-mean, global-neighborhood) kriging: conditional expectation
/// mean = C*^T S^-1 z via two triangular solves against the Cholesky factor
/// and conditional variance sigma^2 - ||L^-1 c_i||^2 per target. Exact
/// interpolator at observed sites. Variances in [-1e-10, 0) are clamped to
/// zero; anything more negative raises an error.
KrigingResult krige(const GaussianField& observed, const LocationSet& targets,
                    const MaternParams& params, const ComputeBackend& backend);

/// The two-stage workflow: subtract the linear surface (c, a, b) at the
/// observed sites, krige the residuals, add the surface back at the targets.
KrigingResult krige_with_trend(const LocationSet& observed_locs, std::span<const double> observed_z,
                               const LocationSet& targets, const MaternParams& params,
                               const std::array<double, 3>& trend, const ComputeBackend& backend);

}  // namespace tilegp

#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tilegp/geometry.hpp"
#include "tilegp/kernel.hpp"
#include "tilegp/optimizer.hpp"
#include "tilegp/task_pool.hpp"
#include "tilegp/tiled_matrix.hpp"

namespace tilegp {

/// Observations of a zero-mean Gaussian field. When the two-stage workflow
/// removed a linear trend first, `trend` records the (c, a, b) coefficients
/// of the surface c + a*x + b*y that was subtracted.
struct GaussianField {
  LocationSet locs;
  std::vector<double> z;
  std::optional<std::array<double, 3>> trend;

  void validate() const;
};

/// How the covariance is represented and factorized, plus the execution
/// footprint (worker count and tile size).
struct ComputeBackend {
  ComputeMode mode = ComputeMode::Exact;
  int dst_bandwidth = 1;
  double tlr_accuracy = 1e-9;
  int workers = 1;
  int tile_size = 160;

  void validate() const;
};

struct FitResult {
  MaternParams params;
  double log_lik = 0.0;
  long iterations = 0;
  double total_time = 0.0;     // wall-clock seconds for the whole fit
  double time_per_iter = 0.0;  // total objective time / evaluations
  OptTrace trace;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& msg, OptTrace trace) : std::runtime_error(msg), trace(std::move(trace)) {}
  OptTrace trace;
};

/// Gaussian log-likelihood of the field under Matern(params):
///   l = -(n/2) log(2 pi) - (1/2) log|S| - (1/2) ||L^-1 z||^2
/// computed assemble -> cholesky -> forward solve. Under DST/TLR the matrix
/// factorized is the truncated/compressed surrogate.
double log_likelihood(const GaussianField& field, const MaternParams& params,
                      const ComputeBackend& backend);
double log_likelihood(const GaussianField& field, const MaternParams& params,
                      const ComputeBackend& backend, WorkerPool& pool);

/// Maximum likelihood estimation of (sigma^2, beta, nu) over the bounds box.
/// The optimizer starts at the lower bounds unless opt.initial says
/// otherwise; singular parameter points count as -inf objective values.
FitResult fit_mle(const GaussianField& field, const ParamBounds& bounds, const OptimizerConfig& opt,
                  const ComputeBackend& backend);

struct DetrendResult {
  std::vector<double> residuals;
  std::array<double, 3> coefficients;  // (c, a, b): z ~ c + a*x + b*y
};

/// Ordinary least squares fit of the linear surface, returning residuals for
/// the second-stage covariance fit.
DetrendResult detrend_linear(const LocationSet& locs, std::span<const double> z);

}  // namespace tilegp

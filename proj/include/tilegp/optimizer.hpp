#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tilegp {

/// Settings for the bound-constrained derivative-free maximizer. An empty
/// initial point defaults to the lower bound vector (the convention the fit
/// driver relies on). max_iters counts objective evaluations; 0 means
/// unlimited. A dimension with lower == upper is held fixed.
struct OptimizerConfig {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> initial;
  double tol = 1e-4;
  long max_iters = 0;
  double initial_radius = 0.0;  // 0 picks min box gap / 10
};

struct OptTrace {
  long iterations = 0;  // number of objective evaluations
  double best_value = 0.0;
  std::vector<double> best_point;
  std::vector<double> values;          // raw objective value per evaluation
  std::vector<double> per_eval_times;  // seconds spent in each evaluation
};

class OptimizationError : public std::runtime_error {
 public:
  OptimizationError(const std::string& msg, OptTrace trace)
      : std::runtime_error(msg), trace(std::move(trace)) {}
  OptTrace trace;
};

/// Maximizes the objective over the box by quadratic interpolation with
/// 2n+1 points and a trust-region step restricted to the box, in the BOBYQA
/// family: least-Frobenius-norm model updates, trust radius staged down
/// until the gain of a whole stage drops below tol. Every evaluated point
/// lies inside [lower, upper]; NaN objective values are treated as -inf.
/// Deterministic: no internal randomness.
OptTrace maximize(const std::function<double(std::span<const double>)>& objective,
                  const OptimizerConfig& config);

}  // namespace tilegp

#pragma once

// Brute-force reference implementations used only by the test suite. They
// deliberately share none of the tiled/parallel machinery: dense storage,
// double loops, sequential execution. The Bessel oracle runs in 80-bit long
// double with a 1e-15 relative error budget.

#include <span>
#include <vector>

#include "tilegp/geometry.hpp"
#include "tilegp/kernel.hpp"

namespace oracles {

/// Dense n x n Matern covariance by a plain double loop over all pairs (no
/// tiling, no symmetry shortcut). Row-major.
std::vector<double> naive_covariance(const tilegp::LocationSet& locs, const tilegp::MaternParams& params);

/// Unblocked textbook Cholesky of a dense row-major SPD matrix; returns the
/// lower factor (strict upper zeroed). Throws std::runtime_error on a
/// nonpositive pivot.
std::vector<double> naive_cholesky(std::vector<double> a, int n);

/// Forward / backward substitution against a dense lower factor.
std::vector<double> naive_forward(const std::vector<double>& l, int n, std::span<const double> b);
std::vector<double> naive_backward(const std::vector<double>& l, int n, std::span<const double> b);

/// Gaussian log-likelihood straight from the definition: dense covariance,
/// unblocked Cholesky, explicit solves.
double naive_loglik(const tilegp::LocationSet& locs, std::span<const double> z,
                    const tilegp::MaternParams& params);

/// K_nu(x) in long double: Temme's series below x = 2, the Thompson-Barnett
/// continued fraction above, upward recurrence in the order.
long double bessel_k_oracle(long double nu, long double x);

/// I_nu(x) by its (all-positive) power series in long double; usable up to
/// x ~ 30 which is all the Wronskian consistency check needs.
long double bessel_i_series(long double nu, long double x);

/// Great-circle distance in long double (haversine), degrees in.
long double haversine_oracle(long double lon1, long double lat1, long double lon2, long double lat2,
                             long double radius);

/// OLS coefficients for z ~ c + a x + b y via normal equations in long double.
std::vector<long double> ols_normal_equations(const tilegp::LocationSet& locs, std::span<const double> z);

}  // namespace oracles

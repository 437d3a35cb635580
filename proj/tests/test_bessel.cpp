#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tilegp/kernel.hpp"

using namespace tilegp;

namespace {
double rel_err(double got, long double want) {
  return static_cast<double>(std::fabs(got - static_cast<double>(want)) / std::fabs(static_cast<double>(want)));
}
}  // namespace

TEST_CASE("half-integer closed forms") {
  // K_{1/2}(x) = sqrt(pi/(2x)) e^-x
  CHECK(rel_err(bessel_k(0.5, 1.0), std::sqrt(M_PI / 2.0) * std::exp(-1.0)) < 1e-13);
  CHECK(bessel_k(0.5, 1.0) == doctest::Approx(0.461068504).epsilon(1e-9));
  // K_{3/2}(x) = sqrt(pi/(2x)) e^-x (1 + 1/x)
  CHECK(rel_err(bessel_k(1.5, 2.0), std::sqrt(M_PI / 4.0) * std::exp(-2.0) * 1.5) < 1e-13);
  CHECK(bessel_k(1.5, 2.0) == doctest::Approx(0.1799067).epsilon(1e-6));
}

TEST_CASE("K_1(1) against the extended-precision oracle") {
  CHECK(rel_err(bessel_k(1.0, 1.0), oracles::bessel_k_oracle(1.0L, 1.0L)) < 1e-12);
}

TEST_CASE("oracle certification: closed forms and the Wronskian identity") {
  // closed forms in long double
  CHECK(std::fabs(static_cast<double>(oracles::bessel_k_oracle(0.5L, 1.0L) /
                                      (std::sqrt(M_PI / 2.0L) * std::exp(-1.0L)) - 1.0L)) < 1e-16);
  CHECK(std::fabs(static_cast<double>(oracles::bessel_k_oracle(1.5L, 2.0L) /
                                      (std::sqrt(M_PI / 4.0L) * std::exp(-2.0L) * 1.5L) - 1.0L)) < 1e-16);
  // K_mu(x) I_{mu+1}(x) + K_{mu+1}(x) I_mu(x) = 1/x, I from its power series
  for (long double mu : {0.2L, 0.5L, 1.0L, 1.3L, 2.7L, 4.6L, 7.9L}) {
    for (long double x : {0.1L, 0.5L, 1.0L, 2.0L, 5.0L, 10.0L, 25.0L}) {
      const long double lhs = oracles::bessel_k_oracle(mu, x) * oracles::bessel_i_series(mu + 1.0L, x) +
                              oracles::bessel_k_oracle(mu + 1.0L, x) * oracles::bessel_i_series(mu, x);
      const long double rhs = 1.0L / x;
      CHECK(std::fabs(static_cast<double>(lhs / rhs - 1.0L)) < 1e-13);
    }
  }
}

TEST_CASE("200-point grid against the oracle at 1e-12 relative") {
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const double nu = 0.05 + 9.95 * i / 19.0;  // (0, 10]
    for (int j = 0; j < 10; ++j) {
      const double x = std::exp(std::log(1e-8) + (std::log(700.0) - std::log(1e-8)) * j / 9.0);
      const auto got = bessel_k_ex(nu, x);
      const long double want = oracles::bessel_k_oracle(nu, x);
      if (got.underflowed) {
        CHECK(static_cast<double>(want) == 0.0);
      } else {
        CHECK(rel_err(got.value, want) < 1e-12);
      }
      ++checked;
    }
  }
  CHECK(checked == 200);
}

TEST_CASE("underflow far in the tail returns zero with the signal set") {
  const auto r = bessel_k_ex(0.5, 800.0);
  CHECK(r.value == 0.0);
  CHECK(r.underflowed);
  CHECK(!bessel_k_ex(0.5, 700.0).underflowed);
  CHECK(bessel_k(0.5, 700.0) > 0.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(bessel_k(0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k(0.5, -1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k(-1.0, 1.0), std::domain_error);
}

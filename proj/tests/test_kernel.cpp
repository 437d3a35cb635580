#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tilegp/cholesky.hpp"
#include "tilegp/errors.hpp"
#include "tilegp/kernel.hpp"
#include "tilegp/rng.hpp"

using namespace tilegp;

TEST_CASE("variance at zero lag") {
  CHECK(matern(0.0, {3.7, 0.2, 1.1}) == 3.7);
}

TEST_CASE("exponential special case nu = 1/2") {
  CHECK(matern(0.1, {1.0, 0.1, 0.5}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(matern(0.1, {1.0, 0.1, 0.5}) == doctest::Approx(0.3678794).epsilon(1e-7));
}

TEST_CASE("nu = 3/2 closed form") {
  CHECK(matern(1.0, {2.0, 1.0, 1.5}) == doctest::Approx(2.0 * 2.0 * std::exp(-1.0)).epsilon(1e-13));
  CHECK(matern(1.0, {2.0, 1.0, 1.5}) == doctest::Approx(1.4715178).epsilon(1e-7));
}

TEST_CASE("continuity at zero lag") {
  for (double nu : {0.5, 1.0, 2.0}) {
    const MaternParams p{2.5, 0.3, nu};
    CHECK(std::fabs(matern(1e-12, p) - p.sigma_sq) < 1e-8 * p.sigma_sq);
  }
}

TEST_CASE("half-integer closed forms to 1e-12 over d/beta in [1e-6, 30]") {
  const double sigma_sq = 1.7, beta = 0.4;
  for (int i = 0; i < 1000; ++i) {
    const double t = std::exp(std::log(1e-6) + (std::log(30.0) - std::log(1e-6)) * i / 999.0);
    const double d = t * beta;
    const double e = std::exp(-t);
    const double f12 = sigma_sq * e;
    const double f32 = sigma_sq * (1.0 + t) * e;
    const double f52 = sigma_sq * (1.0 + t + t * t / 3.0) * e;
    CHECK(std::fabs(matern(d, {sigma_sq, beta, 0.5}) - f12) <= 1e-12 * f12);
    CHECK(std::fabs(matern(d, {sigma_sq, beta, 1.5}) - f32) <= 1e-12 * f32);
    CHECK(std::fabs(matern(d, {sigma_sq, beta, 2.5}) - f52) <= 1e-12 * f52);
  }
}

TEST_CASE("monotone nonincreasing in distance") {
  SplitMix64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const MaternParams p{0.1 + 5 * rng.next_uniform(), 0.01 + rng.next_uniform(), 0.05 + 4 * rng.next_uniform()};
    const MaternEvaluator k(p);
    double prev = k(0.0);
    for (int i = 1; i <= 300; ++i) {
      const double cur = k(i * 0.02);
      CHECK(cur <= prev * (1.0 + 1e-14) + 1e-300);
      prev = cur;
    }
  }
}

TEST_CASE("far field is exactly zero") {
  CHECK(matern(701.0, {1.0, 1.0, 0.5}) == 0.0);
  CHECK(matern(7.1, {1.0, 0.01, 2.0}) == 0.0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(matern(1.0, {0.0, 1.0, 0.5}), std::domain_error);
  CHECK_THROWS_AS(matern(1.0, {1.0, -1.0, 0.5}), std::domain_error);
  CHECK_THROWS_AS(matern(1.0, {1.0, 1.0, 0.0}), std::domain_error);
}

TEST_CASE("assemble: n = 1") {
  WorkerPool pool(1);
  LocationSet locs{{0.3}, {0.4}, {}};
  const TiledMatrix a = assemble_covariance(locs, {2.25, 0.1, 0.5}, TileLayout(1, 1), pool);
  CHECK(a.tile(0, 0).a[0] == 2.25);
}

TEST_CASE("assemble: n = 2 at distance log 2 gives correlation 1/2") {
  WorkerPool pool(1);
  LocationSet locs{{0.0, std::log(2.0)}, {0.0, 0.0}, {}};
  const TiledMatrix a = assemble_covariance(locs, {1.0, 1.0, 0.5}, TileLayout(2, 2), pool);
  CHECK(a.tile(0, 0).a[2] == doctest::Approx(0.5).epsilon(1e-13));  // row 1, col 0
}

TEST_CASE("assemble matches the naive double-loop oracle entrywise") {
  WorkerPool pool(2);
  const LocationSet locs = grid_locations(20, 20, 0.0, 1.0, 0.0, 1.0);
  const MaternParams params{1.0, 0.1, 0.5};
  const TiledMatrix a = assemble_covariance(locs, params, TileLayout(400, 96), pool);
  const std::vector<double> got = a.densify_symmetric();
  const std::vector<double> want = oracles::naive_covariance(locs, params);
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(std::fabs(got[i] - want[i]) <= 1e-15 * std::fabs(want[i]));
  }
}

TEST_CASE("assembled matrix is exactly symmetric") {
  WorkerPool pool(2);
  const LocationSet locs = random_locations(157, 3);
  const TiledMatrix a = assemble_covariance(locs, {1.3, 0.2, 1.2}, TileLayout(157, 40), pool);
  const std::vector<double> d = a.densify_symmetric();
  for (int r = 0; r < 157; ++r)
    for (int c = 0; c < r; ++c)
      CHECK(d[static_cast<std::size_t>(r) * 157 + c] == d[static_cast<std::size_t>(c) * 157 + r]);
}

TEST_CASE("duplicate locations raise the warning and the factorization fails hard") {
  WorkerPool pool(1);
  LocationSet locs{{0.1, 0.5, 0.1}, {0.2, 0.6, 0.2}, {}};
  TiledMatrix a = assemble_covariance(locs, {1.0, 0.1, 0.5}, TileLayout(3, 2), pool);
  CHECK(a.duplicate_warning());
  CHECK_THROWS_AS(cholesky_in_place(a, pool), SingularityError);

  const LocationSet ok = random_locations(8, 1);
  const TiledMatrix b = assemble_covariance(ok, {1.0, 0.1, 0.5}, TileLayout(8, 4), pool);
  CHECK(!b.duplicate_warning());
}

TEST_CASE("positive definite across the nine parameter scenarios") {
  WorkerPool pool(2);
  int sets = 0;
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const LocationSet locs = random_locations(120, seed);
    for (double beta : {0.03, 0.1, 0.3}) {
      for (double nu : {0.5, 1.0, 2.0}) {
        TiledMatrix a = assemble_covariance(locs, {1.0, beta, nu}, TileLayout(120, 32), pool);
        CHECK_NOTHROW(cholesky_in_place(a, pool));
      }
    }
    ++sets;
  }
  CHECK(sets == 100);
}

TEST_CASE("bounds validation") {
  ParamBounds good;
  CHECK_NOTHROW(good.validate());
  ParamBounds bad1{{0.0, 0.001, 0.001}, {5, 5, 5}};
  CHECK_THROWS_AS(bad1.validate(), std::invalid_argument);
  ParamBounds bad2{{0.1, 0.1, 0.1}, {5, 5, 0.01}};
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}

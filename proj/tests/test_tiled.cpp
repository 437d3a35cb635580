#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tilegp/cholesky.hpp"
#include "tilegp/errors.hpp"
#include "tilegp/kernel.hpp"

using namespace tilegp;
using testutil::frob_diff;
using testutil::frob_norm;
using testutil::random_spd;
using testutil::tiled_from_dense;

TEST_CASE("hand-checkable 2x2, ts = 1") {
  WorkerPool pool(1);
  TiledMatrix a = tiled_from_dense({4, 2, 2, 3}, 2, 1);
  cholesky_in_place(a, pool);
  const std::vector<double> l = a.densify_lower();
  CHECK(l[0] == 2.0);
  CHECK(l[1] == 0.0);
  CHECK(l[2] == 1.0);
  CHECK(l[3] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("identity factors to identity for any tile size") {
  WorkerPool pool(2);
  std::vector<double> eye(100 * 100, 0.0);
  for (int i = 0; i < 100; ++i) eye[static_cast<std::size_t>(i) * 100 + i] = 1.0;
  for (int ts : {7, 32, 100}) {
    TiledMatrix a = tiled_from_dense(eye, 100, ts);
    cholesky_in_place(a, pool);
    CHECK(frob_diff(a.densify_lower(), eye) == 0.0);
  }
}

TEST_CASE("ragged tiles against the unblocked oracle") {
  WorkerPool pool(2);
  const std::vector<double> spd = random_spd(257, 17);
  TiledMatrix a = tiled_from_dense(spd, 257, 64);  // 257 = 4*64 + 1: ragged last tile
  cholesky_in_place(a, pool);
  const std::vector<double> want = oracles::naive_cholesky(spd, 257);
  CHECK(frob_diff(a.densify_lower(), want) <= 1e-10 * frob_norm(want));
}

TEST_CASE("tile-size independence") {
  WorkerPool pool(2);
  const LocationSet locs = random_locations(400, 23);
  const MaternParams params{1.0, 0.1, 0.5};
  std::vector<std::vector<double>> factors;
  for (int ts : {32, 64, 100, 160}) {
    TiledMatrix a = assemble_covariance(locs, params, TileLayout(400, ts), pool);
    cholesky_in_place(a, pool);
    factors.push_back(a.densify_lower());
  }
  for (std::size_t i = 1; i < factors.size(); ++i)
    CHECK(frob_diff(factors[0], factors[i]) <= 1e-11 * frob_norm(factors[0]));
}

TEST_CASE("repeated factorizations are bitwise identical under a fixed worker count") {
  const std::vector<double> spd = random_spd(200, 29);
  for (int workers : {1, 3}) {
    WorkerPool pool(workers);
    TiledMatrix a = tiled_from_dense(spd, 200, 48);
    TiledMatrix b = tiled_from_dense(spd, 200, 48);
    cholesky_in_place(a, pool);
    cholesky_in_place(b, pool);
    CHECK(a.densify_lower() == b.densify_lower());
  }
  // the chained-update DAG pins the result across worker counts too
  WorkerPool p1(1), p4(4);
  TiledMatrix a = tiled_from_dense(spd, 200, 48);
  TiledMatrix b = tiled_from_dense(spd, 200, 48);
  cholesky_in_place(a, p1);
  cholesky_in_place(b, p4);
  CHECK(a.densify_lower() == b.densify_lower());
}

TEST_CASE("singularity error names the failing tile") {
  WorkerPool pool(1);
  std::vector<double> bad(10 * 10, 0.0);
  for (int i = 0; i < 10; ++i) bad[static_cast<std::size_t>(i) * 10 + i] = 1.0;
  bad[7 * 10 + 7] = -5.0;  // global row 7, tile 2 with ts = 3
  TiledMatrix a = tiled_from_dense(bad, 10, 3);
  try {
    cholesky_in_place(a, pool);
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.tile_index() == 2);
  }
}

TEST_CASE("forward and backward solves") {
  WorkerPool pool(1);

  SUBCASE("identity") {
    std::vector<double> eye(9, 0.0);
    for (int i = 0; i < 3; ++i) eye[static_cast<std::size_t>(i) * 3 + i] = 1.0;
    const TiledMatrix l = tiled_from_dense(eye, 3, 2);
    const std::vector<double> b{1.5, -2.0, 7.0};
    CHECK(solve_triangular(l, b, TriangularSide::Forward) == b);
    CHECK(solve_triangular(l, b, TriangularSide::Backward) == b);
  }

  SUBCASE("hand 2x2") {
    const double r2 = std::sqrt(2.0);
    const TiledMatrix l = tiled_from_dense({2, 0, 1, r2}, 2, 1);
    const std::vector<double> y = solve_triangular(l, std::vector<double>{2.0, 1.0 + r2}, TriangularSide::Forward);
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-15));
  }

  SUBCASE("n = 300 against the dense oracle") {
    const std::vector<double> spd = random_spd(300, 31);
    TiledMatrix l = tiled_from_dense(spd, 300, 64);
    cholesky_in_place(l, pool);
    SplitMix64 rng(33);
    std::vector<double> b(300);
    double bmax = 0.0;
    for (double& v : b) {
      v = rng.next_uniform() * 4 - 2;
      bmax = std::max(bmax, std::fabs(v));
    }
    const std::vector<double> dense_l = l.densify_lower();
    const std::vector<double> y = solve_triangular(l, b, TriangularSide::Forward);
    const std::vector<double> y_ref = oracles::naive_forward(dense_l, 300, b);
    // residual check: ||L y - b||_inf
    double resid = 0.0;
    for (int i = 0; i < 300; ++i) {
      double s = 0.0;
      for (int j = 0; j <= i; ++j) s += dense_l[static_cast<std::size_t>(i) * 300 + j] * y[j];
      resid = std::max(resid, std::fabs(s - b[i]));
    }
    CHECK(resid <= 1e-10 * bmax);
    for (int i = 0; i < 300; ++i) CHECK(y[i] == doctest::Approx(y_ref[i]).epsilon(1e-9));

    const std::vector<double> x = solve_triangular(l, b, TriangularSide::Backward);
    const std::vector<double> x_ref = oracles::naive_backward(dense_l, 300, b);
    for (int i = 0; i < 300; ++i) CHECK(x[i] == doctest::Approx(x_ref[i]).epsilon(1e-9));
  }

  SUBCASE("zero diagonal raises") {
    const TiledMatrix l = tiled_from_dense({0, 0, 0, 1}, 2, 2);
    CHECK_THROWS_AS(solve_triangular(l, std::vector<double>{1.0, 1.0}, TriangularSide::Forward),
                    SingularityError);
  }
}

TEST_CASE("log determinant") {
  WorkerPool pool(1);
  std::vector<double> eye(25, 0.0);
  for (int i = 0; i < 5; ++i) eye[static_cast<std::size_t>(i) * 5 + i] = 1.0;
  CHECK(log_det_from_factor(tiled_from_dense(eye, 5, 2)) == 0.0);

  TiledMatrix d = tiled_from_dense({4, 0, 0, 3}, 2, 1);
  cholesky_in_place(d, pool);
  CHECK(log_det_from_factor(d) == doctest::Approx(std::log(12.0)).epsilon(1e-14));
  CHECK(log_det_from_factor(d) == doctest::Approx(2.4849066).epsilon(1e-7));

  const LocationSet locs = random_locations(400, 37);
  const MaternParams params{1.0, 0.1, 0.5};
  TiledMatrix a = assemble_covariance(locs, params, TileLayout(400, 96), pool);
  cholesky_in_place(a, pool);
  const std::vector<double> lref = oracles::naive_cholesky(oracles::naive_covariance(locs, params), 400);
  double want = 0.0;
  for (int i = 0; i < 400; ++i) want += std::log(lref[static_cast<std::size_t>(i) * 400 + i]);
  want *= 2.0;
  CHECK(std::fabs(log_det_from_factor(a) - want) <= 1e-9);
}

TEST_CASE("DST truncation structure") {
  WorkerPool pool(1);
  const std::vector<double> spd = random_spd(120, 41);

  SUBCASE("full bandwidth leaves the matrix unchanged") {
    const TiledMatrix exact = tiled_from_dense(spd, 120, 30);
    const TiledMatrix full = dst_truncate(tiled_from_dense(spd, 120, 30), 3);  // nt-1 = 3
    CHECK(frob_diff(exact.densify_symmetric(), full.densify_symmetric()) == 0.0);
  }

  SUBCASE("bandwidth 0 is block diagonal and factors per block") {
    TiledMatrix bd = dst_truncate(tiled_from_dense(spd, 120, 30), 0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < i; ++j) CHECK(bd.tile(i, j).kind == TileKind::Zero);
    cholesky_in_place(bd, pool);
    // each diagonal block must equal its own unblocked factor
    for (int i = 0; i < 4; ++i) {
      std::vector<double> block(30 * 30);
      for (int r = 0; r < 30; ++r)
        for (int c = 0; c < 30; ++c) block[static_cast<std::size_t>(r) * 30 + c] = spd[static_cast<std::size_t>(30 * i + r) * 120 + 30 * i + c];
      const std::vector<double> want = oracles::naive_cholesky(block, 30);
      double diff = 0.0;
      for (int k = 0; k < 900; ++k) diff = std::max(diff, std::fabs(want[k] - bd.tile(i, i).a[k]));
      CHECK(diff <= 1e-12);
    }
  }

  SUBCASE("monotone structure in the bandwidth") {
    for (int b1 = 0; b1 < 3; ++b1) {
      const TiledMatrix m1 = dst_truncate(tiled_from_dense(spd, 120, 30), b1);
      const TiledMatrix m2 = dst_truncate(tiled_from_dense(spd, 120, 30), b1 + 1);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j <= i; ++j)
          if (m2.tile(i, j).kind == TileKind::Zero) CHECK(m1.tile(i, j).kind == TileKind::Zero);
    }
  }

  SUBCASE("negative bandwidth rejected") {
    CHECK_THROWS_AS(dst_truncate(tiled_from_dense(spd, 120, 30), -1), std::invalid_argument);
  }
}

TEST_CASE("binary dump round trip") {
  WorkerPool pool(1);
  const LocationSet locs = random_locations(90, 43);
  const TiledMatrix a = assemble_covariance(locs, {1.0, 0.1, 0.5}, TileLayout(90, 40), pool);
  const std::string path = "tiled_dump_test.bin";

  write_tiled(path, a);
  const TiledMatrix b = read_tiled(path);
  CHECK(b.layout().n == 90);
  CHECK(b.layout().ts == 40);
  CHECK(b.mode() == ComputeMode::Exact);
  CHECK(a.densify_symmetric() == b.densify_symmetric());

  const TiledMatrix tl = tlr_compress(a, 1e-6, pool);
  write_tiled(path, tl);
  const TiledMatrix tl2 = read_tiled(path);
  CHECK(tl2.mode() == ComputeMode::Tlr);
  CHECK(tl.densify_symmetric() == tl2.densify_symmetric());
  for (int i = 0; i < tl2.layout().nt; ++i)
    for (int j = 0; j < i; ++j) CHECK(tl2.tile(i, j).rank == tl.tile(i, j).rank);
  std::remove(path.c_str());
}

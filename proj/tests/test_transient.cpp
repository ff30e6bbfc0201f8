#include <doctest.h>

#include <cmath>

#include "eshelby/oracle.hpp"
#include "eshelby/transient.hpp"

using namespace eshelby;

namespace {
const Material mat = Material::make(0.05, 1.0);
const Vec3 x0(0.03, -0.05, 0.15);
}  // namespace

// references from the cone-quadrature oracle at rel 1e-11

TEST_CASE("spatial L of a cube against the oracle") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  CHECK(spatial_L(cube, x0, 2.0, mat) == doctest::Approx(0.00519755241862654).epsilon(1e-9));
  CHECK(spatial_L(cube.triangulated(), x0, 2.0, mat) == doctest::Approx(0.00519755241862654).epsilon(1e-9));
}

TEST_CASE("spatial L limits") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  Vec3 inside(0.01, 0.02, -0.03);
  // short lag needs more terms; the default truncation reports it
  Flags coarse;
  spatial_L(cube, inside, 0.01, mat, {}, &coarse);
  CHECK(coarse.series_unconverged);
  CHECK(spatial_L(cube, inside, 0.01, mat, {60}) == doctest::Approx(0.978431601189).epsilon(1e-6));
  Flags fine;
  spatial_L(cube, Vec3(0.35, 0.02, 0.01), 0.1, mat, {60}, &fine);
  CHECK_FALSE(fine.series_unconverged);
  CHECK(spatial_L(cube, Vec3(0.35, 0.02, 0.01), 0.1, mat, {60}) ==
        doctest::Approx(0.00284169635522).epsilon(1e-9));
  // causal: no response before the source acts
  CHECK(spatial_L(cube, x0, -1.0, mat) == 0.0);
  CHECK(spatial_L(cube, x0, 0.0, mat) == 0.0);
}

TEST_CASE("time-integrated C^1 against the oracle") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  CHECK(C_nf(cube, x0, 3.0, 0.5, 1.5, 1, mat) == doctest::Approx(0.00104498324569053).epsilon(1e-9));
}

TEST_CASE("gradients match finite differences") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  Vec3 g = grad_spatial_L(cube, x0, 2.0, mat);
  Vec3 fd = fd_gradient([&](const Vec3& y) { return spatial_L(cube, y, 2.0, mat); }, x0, 1e-4);
  CHECK((g - fd).norm() < 1e-8 * (1 + g.norm()));
  Vec3 gc = grad_C_nf(cube, x0, 3.0, 0.5, 1.5, 2, mat);
  Vec3 fc = fd_gradient([&](const Vec3& y) { return C_nf(cube, y, 3.0, 0.5, 1.5, 2, mat); }, x0, 1e-4);
  CHECK((gc - fc).norm() < 1e-8 * (1 + gc.norm()));
}

TEST_CASE("higher derivatives match finite differences of the gradient") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  HigherDerivs hd = higher_derivs_C(cube, x0, 3.0, 0.5, 1.5, 0, mat, {}, 2);
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Unit(i) * 1e-4;
    Vec3 d = (grad_C_nf(cube, x0 + e, 3.0, 0.5, 1.5, 0, mat) - grad_C_nf(cube, x0 - e, 3.0, 0.5, 1.5, 0, mat)) / 2e-4;
    for (int j = 0; j < 3; ++j) CHECK(hd.d2(i, j) == doctest::Approx(d[j]).epsilon(1e-6).scale(1e-6));
  }
}

TEST_CASE("argument errors") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  CHECK_THROWS_AS(C_nf(cube, x0, 3.0, 1.5, 0.5, 0, mat), IntervalError);
  CHECK_THROWS_AS(C_nf(cube, x0, 3.0, 0.5, 1.5, 3, mat), UnsupportedOrder);
  CHECK_THROWS_AS(higher_derivs_C(cube, x0, 3.0, 0.5, 1.5, 0, mat, {}, 4), UnsupportedOrder);
  CHECK_THROWS_AS(SeriesParams{-1}.validate(), PreconditionError);
  CHECK_THROWS_AS((TimeGrid{0, 0, 1}.validate()), PreconditionError);
}

TEST_CASE("windows are causal") {
  TimeGrid grid{0, 0.5, 4};
  LagWindow w;
  CHECK_FALSE(window_at(grid, 2, 0.5, w));
  REQUIRE(window_at(grid, 2, 0.8, w));
  CHECK(w.tau1 == 0.0);
  CHECK(w.tau2 == doctest::Approx(0.3));
  REQUIRE(window_at(grid, 1, 2.0, w));
  CHECK(w.tau1 == doctest::Approx(1.5));
  CHECK(w.tau2 == doctest::Approx(2.0));
}

TEST_CASE("temperature from a uniform source is minus C^0 and the flux is its gradient") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  TimeGrid grid{0, 1, 2};
  EigenCoeffs c;
  c.Q0 = 1;
  std::vector<EigenCoeffs> coeffs{c};
  Vec3 x(0.3, 0.05, -0.02);
  double u = temperature(cube, x, 2.5, coeffs, grid, mat);
  CHECK(u == doctest::Approx(-C_nf(cube, x, 2.5, 0, 1, 0, mat)).epsilon(1e-12));
  Vec3 q = flux(cube, x, 2.5, coeffs, grid, mat);
  Vec3 fd = fd_gradient([&](const Vec3& y) { return temperature(cube, y, 2.5, coeffs, grid, mat); }, x, 1e-4);
  CHECK((q + mat.K * fd).norm() < 1e-8 * (1 + q.norm()));
  // before the first window opens nothing has happened
  CHECK(temperature(cube, x, 0.0, coeffs, grid, mat) == 0.0);
}

TEST_CASE("tensor contraction is linear in the coefficients") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  TimeGrid grid{0, 1, 1};
  TensorSet ts = assemble_tensors(cube, x0, 1.5, 1, grid, mat);
  EigenCoeffs a, b;
  a.Q1 = Vec3(1, 2, 3);
  a.U0 = Vec3(0.5, 0, -1);
  b.Q2(0, 1) = b.Q2(1, 0) = 0.7;
  b.U1(2, 2) = 1.3;
  b.U2[5] = -0.4;
  EigenCoeffs s = a;
  s.Q2 = b.Q2;
  s.U1 = b.U1;
  s.U2 = b.U2;
  CHECK(ts.contract(s) == doctest::Approx(ts.contract(a) + ts.contract(b)).epsilon(1e-13));
  CHECK(ts.L == doctest::Approx(-C_nf(cube, x0, 1.5, 0, 1, 0, mat)).epsilon(1e-12));
}

TEST_CASE("gauss tail") {
  for (double v : {1e-3, 0.1, 1.0, 2.4, 2.6, 5.0}) {
    for (int N : {0, 1, 3}) {
      // Σ_{m>N} (-v)^m/m! summed directly, free of the cancellation in e^{-v} - Σ_{m<=N}
      double term = 1, direct = 0;
      for (int m = 1; m <= N + 1; ++m) term *= -v / m;
      for (int m = N + 1; m < N + 80; ++m) {
        direct += term;
        term *= -v / (m + 1);
      }
      CHECK(gauss_tail(v, N) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

#include <doctest.h>

#include <cmath>

#include "eshelby/oracle.hpp"

using namespace eshelby;

TEST_CASE("region volumes and moments") {
  Polyhedron c = make_cuboid(0.2, 0.4, 0.6, Vec3(0.1, 0, 0));
  Vec3 x(0.05, 0.1, -0.2);
  auto one = [](const Vec3&) { return 1.0; };
  CHECK(quad_region(c, x, one) == doctest::Approx(0.048).epsilon(1e-10));
  CHECK(quad_region(c, x, [](const Vec3& y) { return y[0]; }) == doctest::Approx(0.0048).epsilon(1e-10));
  Ellipsoid e{0.1, 0.2, 0.3};
  double ve = 4 * M_PI / 3 * 0.1 * 0.2 * 0.3;
  CHECK(quad_region(e, Vec3(0.02, 0.05, -0.1), one) == doctest::Approx(ve).epsilon(1e-9));
  CHECK(quad_region(e, Vec3(0.3, 0.5, 0.1), [](const Vec3& y) { return y[2] * y[2]; }) ==
        doctest::Approx(ve * 0.09 / 5).epsilon(1e-9));
}

TEST_CASE("singular integrand inside the region") {
  // Newtonian potential of a ball at an interior point: 2π(a² - r²/3)
  Ellipsoid b{1, 1, 1};
  Vec3 x(0.3, 0.1, -0.2);
  double ref = 2 * M_PI * (1 - x.squaredNorm() / 3);
  CHECK(quad_region(b, x, [&](const Vec3& y) { return 1 / (y - x).norm(); }) == doctest::Approx(ref).epsilon(1e-8));
  CHECK(quad_ball_radial(1.0, x.norm(), [](double d) { return 1 / d; }) == doctest::Approx(ref).epsilon(1e-9));
  // d/dr of 2π(a² - r²/3) = -4πr/3
  CHECK(quad_ball_radial_dr(1.0, x.norm(), [](double d) { return 1 / d; }) ==
        doctest::Approx(-4 * M_PI * x.norm() / 3).epsilon(1e-8));
}

TEST_CASE("tolerance validation") {
  CHECK_THROWS((OracleTol{-1, 0, 12}.validate()));
  CHECK_THROWS((GridSpec{100, 4, 0}.validate()));
}

TEST_CASE("FFT maps: centre value and symmetry") {
  Material m = Material::make(1.0, 1.0);
  GridSpec g{64, 4.0, 0.0};
  PlaneMaps pm = fft_cuboid_maps(0.5, 0.05, std::nullopt, m, g);
  REQUIRE(pm.n == 64);
  int mid = 32;
  CHECK(pm.coord[mid] == 0.0);
  // centre value: erf(l / (4 sqrt(αt)))³ for a cube of edge l
  CHECK(pm.at(pm.F, mid, mid) == doctest::Approx(std::pow(std::erf(0.25 / std::sqrt(0.2)), 3)).epsilon(1e-8));
  // symmetry in x3 about the centre row
  for (int j = 1; j < 20; ++j) CHECK(pm.at(pm.F, mid, mid + j) == doctest::Approx(pm.at(pm.F, mid, mid - j)).epsilon(1e-10));
  CHECK(std::abs(pm.at(pm.F3, mid, mid)) < 1e-8);
}

TEST_CASE("FFT maps agree with the closed-form series") {
  Material m = Material::make(0.05, 1.0);
  GridSpec g{128, 4.0, 0.0};
  PlaneMaps pm = fft_cuboid_maps(0.2, 2.0, std::nullopt, m, g);
  int i2 = 64 + 8, i3 = 64 - 5;
  Vec3 x(0.0, pm.coord[i2], pm.coord[i3]);
  double ref = spatial_L(make_cuboid(0.2, 0.2, 0.2), x, 2.0, m);
  CHECK(pm.at(pm.F, i2, i3) == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("jump of a step function") {
  auto step = [](const Vec3& y) { return y[2] > 0 ? 3.0 + y[2] : y[2]; };
  JumpResult jr = jump_measure(step, Vec3(0.1, 0.2, 0.0), Vec3(0, 0, 1), 1e-3);
  CHECK(jr.jump == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(jr.reliable);
  auto smooth = [](const Vec3& y) { return std::sin(y[2]); };
  CHECK(std::abs(jump_measure(smooth, Vec3::Zero(), Vec3(0, 0, 1), 1e-3).jump) < 1e-8);
}

TEST_CASE("finite differences") {
  auto f = [](const Vec3& y) { return y[0] * y[0] * y[1] + std::exp(y[2]); };
  Vec3 x(0.5, -1, 0.2);
  Vec3 g = fd_gradient(f, x, 1e-4);
  CHECK(g[0] == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(g[1] == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(g[2] == doctest::Approx(std::exp(0.2)).epsilon(1e-7));
  CHECK(fd_second(f, x, 0, 1, 1e-3) == doctest::Approx(1.0).epsilon(1e-6));
}

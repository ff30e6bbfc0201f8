#include <doctest.h>

#include <cmath>

#include "eshelby/oracle.hpp"
#include "eshelby/sphere.hpp"

using namespace eshelby;

namespace {
const Material mat = Material::make(0.05, 1.0);
}

TEST_CASE("ball closed form against the shell oracle") {
  double r = Vec3(0, 0.02, 0.045).norm();
  CHECK(sphere_L(0.1, r, 0.3, mat) == doctest::Approx(0.0446393277302693).epsilon(1e-10));
  // far away the ball looks like a point source of volume 4πa³/3
  double a = 0.01, R = 0.5, t = 3.0;
  double point = 4 * M_PI * a * a * a / 3 * std::exp(-R * R / (4 * mat.alpha * t)) /
                 std::pow(4 * M_PI * mat.alpha * t, 1.5);
  CHECK(sphere_L(a, R, t, mat) == doctest::Approx(point).epsilon(1e-4));
}

TEST_CASE("the lag antiderivative differentiates back to the kernel") {
  double a = 0.1, h = 1e-5;
  for (double r : {0.0, 0.05, 0.1, 0.25}) {
    for (int n = 0; n <= 2; ++n) {
      for (double tau : {0.05, 0.4, 2.0}) {
        double d = (sphere_E(a, r, tau + h, mat, n) - sphere_E(a, r, tau - h, mat, n)) / (2 * h);
        double k = std::pow(2 * mat.alpha * tau, n) * sphere_L(a, r, tau, mat);
        CHECK(d == doctest::Approx(k).epsilon(1e-6).scale(1e-9));
      }
    }
  }
}

TEST_CASE("C jets of the ball agree with the antiderivative") {
  double a = 0.1;
  Vec3 x(0.02, -0.03, 0.06);
  LagWindow w{0.3, 1.1};
  auto C = sphere_C_jets<3>(a, x, w, mat);
  for (int n = 0; n <= 2; ++n)
    CHECK(C[n].value() == doctest::Approx(sphere_E(a, x.norm(), 1.1, mat, n) - sphere_E(a, x.norm(), 0.3, mat, n)));
  // radial symmetry: ∂C/∂x_i = x_i/r dC/dr
  double h = 1e-5;
  double dr = (sphere_E(a, x.norm() + h, 1.1, mat, 0) - sphere_E(a, x.norm() - h, 1.1, mat, 0) -
               sphere_E(a, x.norm() + h, 0.3, mat, 0) + sphere_E(a, x.norm() - h, 0.3, mat, 0)) /
              (2 * h);
  for (int i = 0; i < 3; ++i) {
    std::array<int, 3> e{0, 0, 0};
    e[i] = 1;
    CHECK(C[0].deriv(e) == doctest::Approx(x[i] / x.norm() * dr).epsilon(1e-6));
  }
  CHECK_THROWS_AS(sphere_C_jets<3>(a, x, LagWindow{1.0, 0.5}, mat), IntervalError);
}

TEST_CASE("tessellated ball approaches the closed form") {
  Polyhedron s = tessellate_sphere(0.1, 3);
  double r = Vec3(0, 0.02, 0.045).norm();
  double exact = sphere_L(0.1, r, 0.3, mat);
  CHECK(std::abs(spatial_L(s, Vec3(0, 0.02, 0.045), 0.3, mat) - exact) < 0.01 * exact);
}

TEST_CASE("ellipsoid against the cone oracle") {
  Ellipsoid e{0.1, 0.15, 0.2};
  CHECK(ellipsoid_L(e, Vec3(0.02, 0, 0.05), 2.0, mat) == doctest::Approx(0.00854483112058052).epsilon(1e-6));
  CHECK(e.contains(Vec3(0.05, 0.05, 0.05)));
  CHECK_FALSE(e.contains(Vec3(0.11, 0, 0)));
}

TEST_CASE("isotropic ellipsoid reduces to the ball") {
  Ellipsoid e{0.1, 0.1, 0.1};
  for (Vec3 x : {Vec3(0.01, 0.02, 0.03), Vec3(0.15, 0, 0.05)}) {
    double b = sphere_L(0.1, x.norm(), 0.7, mat);
    CHECK(ellipsoid_L(e, x, 0.7, mat) == doctest::Approx(b).epsilon(1e-6));
  }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(sphere_L(-0.1, 0.1, 1, mat), PreconditionError);
  CHECK_THROWS_AS(sphere_E(0.1, 0.1, 1, mat, 3), UnsupportedOrder);
  CHECK_THROWS_AS(sphere_E(0.1, 0.1, -1, mat, 0), PreconditionError);
  CHECK_THROWS_AS((Ellipsoid{0.1, 0, 0.1}.validate()), PreconditionError);
  CHECK_THROWS_AS((ShellQuadrature{4, 16, 8, 1e-6}.validate()), PreconditionError);
}

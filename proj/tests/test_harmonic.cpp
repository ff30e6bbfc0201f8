#include <doctest.h>

#include <cmath>

#include "eshelby/harmonic.hpp"
#include "eshelby/oracle.hpp"

using namespace eshelby;

namespace {
const Vec3 x0(0.03, -0.05, 0.15);
}

TEST_CASE("A0 of a cube against the oracle") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  HarmonicParams hp{{10, 10}, std::nullopt};
  cplx a = A_n(cube, x0, hp, 0);
  CHECK(a.real() == doctest::Approx(0.00220741005087522).epsilon(1e-8));
  CHECK(a.imag() == doctest::Approx(0.0094995672802131).epsilon(1e-8));
}

TEST_CASE("Phi_p moment against the oracle") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  HarmonicParams hp{{10, 10}, std::nullopt};
  PhiTensors pt = phi_tensors(cube, x0, hp);
  cplx ref = quad_helmholtz(cube, x0, {10, 10}, 0, OracleTol{1e-10, 1e-18, 14}, Moment{1, -1, -1});
  CHECK(std::abs(pt.Phi_p[1] - ref) < 1e-6 * std::abs(ref));
}

TEST_CASE("gradient of A_n matches finite differences") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  HarmonicParams hp{{3, 4}, std::nullopt};
  for (int n = 0; n <= 2; ++n) {
    Vec3c g = grad_A_n(cube, x0, hp, n);
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Unit(i) * 1e-4;
      cplx fd = (A_n(cube, x0 + e, hp, n) - A_n(cube, x0 - e, hp, n)) / 2e-4;
      CHECK(std::abs(g[i] - fd) < 1e-7 * (1 + std::abs(g[i])));
    }
  }
}

TEST_CASE("small beta approaches the Newtonian potential") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  HarmonicParams small{{1e-4, 1e-4}, std::nullopt};
  cplx phi = phi_tensors(cube, x0, small).Phi;
  double newton = quad_region(cube, x0, [](const Vec3& y) { return 1.0 / (y - x0).norm(); });
  // e^{iβr}/r = 1/r + iβ + O(β²r)
  cplx first = newton + cplx(0, 1) * small.beta * cube.volume();
  CHECK(std::abs(phi - first) < 1e-9 * newton);
}

TEST_CASE("omega and beta must agree") {
  Material m = Material::make(2.0, 4.0);
  HarmonicParams hp = HarmonicParams::from_omega(2 * M_PI, m.alpha);
  CHECK(hp.beta.imag() > 0);
  CHECK(std::abs(hp.beta * hp.beta - cplx(0, 2 * M_PI / m.alpha)) < 1e-12);
  CHECK_NOTHROW(hp.validate(m.alpha));
  hp.beta *= 1.01;
  CHECK_THROWS_AS(hp.validate(m.alpha), PreconditionError);
  HarmonicParams growing{{1, -1}, std::nullopt};
  CHECK_THROWS_AS(growing.validate(), PreconditionError);
  CHECK_THROWS_AS(A_n(make_cuboid(1, 1, 1), x0, HarmonicParams{{1, 1}, std::nullopt}, 3), UnsupportedOrder);
}

TEST_CASE("harmonic tensors scale with conductivity") {
  Polyhedron cube = make_cuboid(0.2, 0.2, 0.2);
  HarmonicParams hp{{10, 10}, std::nullopt};
  HarmonicTensors h1 = harmonic_eshelby(cube, x0, hp, Material::make(1.0, 1.0));
  HarmonicTensors h2 = harmonic_eshelby(cube, x0, hp, Material::make(2.0, 2.0));
  CHECK(std::abs(h1.L - 2.0 * h2.L) < 1e-14);
  CHECK((h1.Di - h2.Di).norm() < 1e-14);
  PhiTensors pt = phi_tensors(cube, x0, hp);
  CHECK(std::abs(h1.L - pt.Phi / (4 * M_PI)) < 1e-15);
}

#include <doctest.h>

#include <cmath>

#include "eshelby/jet.hpp"

using namespace eshelby;
using J = Jet<double, 3, 3>;

TEST_CASE("products and elementary functions") {
  // f = exp(x) * sin-free polynomial y^2 z at (0.3, -0.2, 0.5)
  J x = J::variable(0, 0.3), y = J::variable(1, -0.2), z = J::variable(2, 0.5);
  J f = exp(x) * y * y * z;
  double e = std::exp(0.3);
  CHECK(f.value() == doctest::Approx(e * 0.04 * 0.5));
  CHECK(f.deriv({1, 0, 0}) == doctest::Approx(e * 0.02));
  CHECK(f.deriv({0, 1, 1}) == doctest::Approx(e * 2 * -0.2));
  CHECK(f.deriv({1, 2, 0}) == doctest::Approx(e * 2 * 0.5));
  CHECK(f.deriv({0, 3, 0}) == doctest::Approx(0.0));
}

TEST_CASE("sqrt of a squared norm differentiates like r") {
  J x = J::variable(0, 0.3), y = J::variable(1, 0.4), z = J::variable(2, 1.2);
  J r = sqrt(x * x + y * y + z * z);
  double R = 1.3;
  CHECK(r.value() == doctest::Approx(R));
  CHECK(r.deriv({1, 0, 0}) == doctest::Approx(0.3 / R));
  // ∂²r/∂x² = (R² - x²)/R³
  CHECK(r.deriv({2, 0, 0}) == doctest::Approx((R * R - 0.09) / (R * R * R)));
  // ∂³r/∂x∂y∂z = 3xyz/R⁵
  CHECK(r.deriv({1, 1, 1}) == doctest::Approx(3 * 0.3 * 0.4 * 1.2 / std::pow(R, 5)));
}

TEST_CASE("diff drops one degree and matches the analytic derivative") {
  J x = J::variable(0, 0.7), y = J::variable(1, 0.1);
  J f = log(x) * atan(y);
  J fx = diff(f, 0);
  CHECK(fx.value() == doctest::Approx(std::atan(0.1) / 0.7));
  CHECK(fx.deriv({0, 1, 0}) == doctest::Approx(1 / 0.7 / 1.01));
  CHECK(fx.deriv({0, 0, 3}) == 0.0);
}

TEST_CASE("from_gradient rebuilds a jet from its gradient") {
  J x = J::variable(0, 0.2), y = J::variable(1, -0.5), z = J::variable(2, 0.9);
  J f = exp(x * y) + z * z * x;
  std::array<Jet<double, 3, 2>, 3> g;
  for (int v = 0; v < 3; ++v) {
    J d = diff(f, v);
    using G = Jet<double, 3, 2>;
    const auto& L = G::Layout::get();
    for (int i = 0; i < G::N; ++i) g[v].c[i] = d.coef(L.exps[i]);
  }
  J h = from_gradient<double, 3>(f.value(), g);
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b)
      for (int c = 0; a + b + c <= 3; ++c) CHECK(h.coef({a, b, c}) == doctest::Approx(f.coef({a, b, c})));
}

TEST_CASE("compose evaluates a Taylor series of the inner jet") {
  J x = J::variable(0, 0.4);
  // coefficients of exp about 0.4
  std::vector<double> c(4);
  double e = std::exp(0.4);
  double fact = 1;
  for (int k = 0; k < 4; ++k) {
    if (k) fact *= k;
    c[k] = e / fact;
  }
  J f = compose(c, x);
  J g = exp(x);
  for (int k = 0; k <= 3; ++k) CHECK(f.deriv({k, 0, 0}) == doctest::Approx(g.deriv({k, 0, 0})));
}

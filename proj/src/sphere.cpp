#include "eshelby/sphere.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>

namespace eshelby {

namespace {

// r·E^n(r, τ) (n = 0..2) or r·L(r, t) (n = -1) for any number type supporting
// the jet elementary functions. τ = 0 takes the steady limit.
template <class T>
T r_times(int n, double a, const T& r, double tau, const Material& m) {
  using std::erf;
  using std::exp;
  const double al = m.alpha, K = m.K;
  T am = a - r, ap = a + r;
  T erfm, erfp, em, ep;
  double sq = 0;
  if (tau > 0) {
    const double s = std::sqrt(4 * al * tau);
    erfm = erf(am * (1.0 / s));
    erfp = erf(ap * (1.0 / s));
    em = exp(am * am * (-1.0 / (s * s)));
    ep = exp(ap * ap * (-1.0 / (s * s)));
    sq = s / std::sqrt(M_PI);
  } else {
    double d = value_of(am);
    erfm = T(d > 0 ? 1.0 : d < 0 ? -1.0 : 0.0);
    erfp = T(1.0);
    em = T(0.0);
    ep = T(0.0);
  }
  const double at = al * tau;
  switch (n) {
    case -1:
      return (r * (erfm + erfp) * 0.5 + (ep - em) * std::sqrt(at / M_PI)) * (1.0 / m.Cp);
    case 0:
      return (((-(2 * a - r) * ap + 4 * at) * ep + ((2 * a + r) * am - 4 * at) * em) * sq +
              ((2 * a + r) * am * am + r * (6 * at)) * erfm + (-(2 * a - r) * ap * ap + r * (6 * at)) * erfp) *
             (1.0 / (12 * K));
    case 1: {
      T ap3 = ap * ap * ap, am3 = am * am * am;
      return ((((4 * a - r) * ap3 - (4 * a - r) * ap * (2 * at) + 48 * at * at) * ep +
               (-(4 * a + r) * am3 + (4 * a + r) * am * (2 * at) - 48 * at * at) * em) *
                  sq -
              ((4 * a + r) * am3 * am - r * (60 * at * at)) * erfm +
              ((4 * a - r) * ap3 * ap + r * (60 * at * at)) * erfp) *
             (1.0 / (120 * K));
    }
    case 2: {
      T ap3 = ap * ap * ap, am3 = am * am * am;
      T ap5 = ap3 * ap * ap, am5 = am3 * am * am;
      return (((-(6 * a - r) * ap5 + (6 * a - r) * ap3 * (2 * at) - (6 * a - r) * ap * (12 * at * at) +
                720 * at * at * at) *
                   ep +
               ((6 * a + r) * am5 - (6 * a + r) * am3 * (2 * at) + (6 * a + r) * am * (12 * at * at) -
                720 * at * at * at) *
                   em) *
                  sq +
              ((6 * a + r) * am5 * am + r * (840 * at * at * at)) * erfm -
              ((6 * a - r) * ap5 * ap - r * (840 * at * at * at)) * erfp) *
             (1.0 / (1260 * K));
    }
  }
  throw UnsupportedOrder("sphere kernel order must be 0, 1 or 2");
}

double scalar_value(int n, double a, double r, double tau, const Material& m) {
  if (r > 1e-6 * a) return r_times<double>(n, a, r, tau, m) / r;
  // removable singularity at r = 0: even series through the r = 0 expansion
  using U = Jet<double, 1, 5>;
  U g = r_times<U>(n, a, U::variable(0, 0.0), tau, m);
  return g.c[1] + g.c[3] * r * r;
}

// Radial function F(|x|) with r·F supplied by r_times, as a jet of degree K in x.
template <int K>
Jet<double, 3, K> radial_jet(int n, double a, const Vec3& x, double tau, const Material& m) {
  using J = Jet<double, 3, K>;
  const double r0 = x.norm();
  double scale = a;
  if (tau > 0) scale = std::min(scale, std::sqrt(4 * m.alpha * tau));
  if (tau == 0) scale = std::min(scale, std::abs(a - r0) + 1e-300);
  if (r0 >= 0.25 * scale) {
    using U = Jet<double, 1, K>;
    U r = U::variable(0, r0);
    U F = r_times<U>(n, a, r, tau, m) / r;
    std::vector<double> c(F.c.begin(), F.c.end());
    J rx = sqrt(J::variable(0, x.x()) * J::variable(0, x.x()) + J::variable(1, x.y()) * J::variable(1, x.y()) +
                J::variable(2, x.z()) * J::variable(2, x.z()));
    return compose(c, rx);
  }
  // even series about r = 0, recomposed in s = x·x
  constexpr int KS = K / 2 + 14;
  using U = Jet<double, 1, 2 * KS + 2>;
  U g = r_times<U>(n, a, U::variable(0, 0.0), tau, m);
  std::vector<double> e(KS + 1);
  for (int j = 0; j <= KS; ++j) e[j] = g.c[2 * j + 1];
  const double s0 = r0 * r0;
  std::vector<double> c(K + 1, 0.0);
  for (int d = 0; d <= K; ++d) {
    double acc = 0;
    for (int j = KS; j >= d; --j) {
      double bin = 1;
      for (int i = 0; i < d; ++i) bin = bin * (j - i) / (i + 1);
      acc += e[j] * bin * std::pow(s0, j - d);
    }
    c[d] = acc;
  }
  J s = J::variable(0, x.x()) * J::variable(0, x.x()) + J::variable(1, x.y()) * J::variable(1, x.y()) +
        J::variable(2, x.z()) * J::variable(2, x.z());
  return compose(c, s);
}

void check_sphere(double a, double r) {
  if (!(a > 0)) throw PreconditionError("sphere radius must be positive");
  if (!(r >= 0)) throw PreconditionError("radial coordinate must be >= 0");
}

}  // namespace

double sphere_L(double a, double r, double t, const Material& mat) {
  check_sphere(a, r);
  if (t <= 0) return 0;
  return scalar_value(-1, a, r, t, mat);
}

double sphere_E(double a, double r, double tau, const Material& mat, int n) {
  check_sphere(a, r);
  if (n < 0 || n > 2) throw UnsupportedOrder("sphere_E: n must be 0, 1 or 2");
  if (tau < 0) throw PreconditionError("sphere_E: tau must be >= 0");
  return scalar_value(n, a, r, tau, mat);
}

template <int K>
Jet<double, 3, K> sphere_L_jet(double a, const Vec3& x, double t, const Material& mat) {
  check_sphere(a, 0);
  if (t <= 0) return Jet<double, 3, K>(0.0);
  return radial_jet<K>(-1, a, x, t, mat);
}

template <int K>
std::array<Jet<double, 3, K>, 3> sphere_C_jets(double a, const Vec3& x, LagWindow w, const Material& mat) {
  check_sphere(a, 0);
  if (!(w.tau2 > w.tau1) || w.tau1 < 0) throw IntervalError("sphere_C_jets: need 0 <= tau1 < tau2");
  std::array<Jet<double, 3, K>, 3> out;
  for (int n = 0; n < 3; ++n) out[n] = radial_jet<K>(n, a, x, w.tau2, mat) - radial_jet<K>(n, a, x, w.tau1, mat);
  return out;
}

TensorSet sphere_tensor_set(double a, const Vec3& x, LagWindow w, const Material& mat) {
  return tensors_from_C<4>(sphere_C_jets<4>(a, x, w, mat), x, mat);
}

template Jet<double, 3, 1> sphere_L_jet<1>(double, const Vec3&, double, const Material&);
template Jet<double, 3, 2> sphere_L_jet<2>(double, const Vec3&, double, const Material&);
template Jet<double, 3, 3> sphere_L_jet<3>(double, const Vec3&, double, const Material&);
template std::array<Jet<double, 3, 1>, 3> sphere_C_jets<1>(double, const Vec3&, LagWindow, const Material&);
template std::array<Jet<double, 3, 2>, 3> sphere_C_jets<2>(double, const Vec3&, LagWindow, const Material&);
template std::array<Jet<double, 3, 3>, 3> sphere_C_jets<3>(double, const Vec3&, LagWindow, const Material&);
template std::array<Jet<double, 3, 4>, 3> sphere_C_jets<4>(double, const Vec3&, LagWindow, const Material&);
template std::array<Jet<double, 3, 6>, 3> sphere_C_jets<6>(double, const Vec3&, LagWindow, const Material&);

// ---- ellipsoid ----

void Ellipsoid::validate() const {
  if (!(a1 > 0 && a2 > 0 && a3 > 0)) throw PreconditionError("Ellipsoid: semi-axes must be positive");
}

bool Ellipsoid::contains(const Vec3& x) const {
  return std::pow(x.x() / a1, 2) + std::pow(x.y() / a2, 2) + std::pow(x.z() / a3, 2) < 1;
}

void ShellQuadrature::validate() const {
  if (n_theta < 8 || n_gamma < 8) throw PreconditionError("ShellQuadrature: n_theta and n_gamma must be >= 8");
  if (max_doublings < 0) throw PreconditionError("ShellQuadrature: max_doublings must be >= 0");
}

namespace {

double shell_sum(const Ellipsoid& ell, const Vec3& x, double t, const Material& mat, int nth, int ngam) {
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> tab(
      gsl_integration_glfixed_table_alloc(ngam), &gsl_integration_glfixed_table_free);
  const double s = std::sqrt(4 * mat.alpha * t);
  const double g = 1.0 / std::sqrt(M_PI * mat.alpha * t);
  double sum = 0;
  for (int i = 0; i < ngam; ++i) {
    double mu, wmu;
    gsl_integration_glfixed_point(-1, 1, i, &mu, &wmu, tab.get());
    double st = std::sqrt(std::max(0.0, 1 - mu * mu));
    double row = 0;
    for (int j = 0; j < nth; ++j) {
      double th = 2 * M_PI * j / nth;
      Vec3 e(st * std::cos(th), st * std::sin(th), mu);
      double S = 1.0 / std::sqrt(std::pow(e.x() / ell.a1, 2) + std::pow(e.y() / ell.a2, 2) +
                                 std::pow(e.z() / ell.a3, 2));
      double B = e.x() * x.x() / ell.a1 + e.y() * x.y() / ell.a2 + e.z() * x.z() / ell.a3;
      double u1 = (1 - B) * S / s, u2 = (1 + B) * S / s;
      row += std::erf(u1) + std::erf(u2) - S * g * (std::exp(-u2 * u2) + std::exp(-u1 * u1));
    }
    sum += wmu * row * (2 * M_PI / nth);
  }
  return sum / (8 * M_PI * mat.Cp);
}

}  // namespace

double ellipsoid_L(const Ellipsoid& ell, const Vec3& x, double t, const Material& mat, const ShellQuadrature& q) {
  ell.validate();
  q.validate();
  if (t <= 0) return 0;
  int nth = q.n_theta, ng = q.n_gamma;
  double prev = shell_sum(ell, x, t, mat, nth, ng);
  for (int k = 0; k < q.max_doublings; ++k) {
    nth *= 2;
    ng *= 2;
    double cur = shell_sum(ell, x, t, mat, nth, ng);
    double change = std::abs(cur - prev);
    if (change <= q.rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  throw AccuracyError("ellipsoid_L: shell quadrature did not settle", std::abs(prev));
}

}  // namespace eshelby

#include "eshelby/slab.hpp"

#include <cmath>
#include <complex>

#include "eshelby/errors.hpp"

namespace eshelby {

double TopLoad::at(double t) const {
  return kind == Kind::Sine ? amplitude * std::sin(2 * M_PI * t / period) : value;
}

void TopLoad::validate() const {
  if (!std::isfinite(value) || !std::isfinite(amplitude)) throw UnsupportedArgument("TopLoad: non-finite level");
  if (kind == Kind::Sine && !(period > 0 && std::isfinite(period)))
    throw UnsupportedArgument("TopLoad: sine period must be positive");
}

namespace {

using cplx = std::complex<double>;

// ∂^k of sin(μx) is μ^k sin(μx + kπ/2)
double dsin(double mu, double x, int k) { return std::pow(mu, k) * std::sin(mu * x + k * M_PI / 2); }

}  // namespace

UndisturbedField slab_undisturbed(double H, const TopLoad& top, double bottom, const Material& mat, double x3,
                                  double t) {
  top.validate();
  mat.validate();
  if (!(H > 0)) throw PreconditionError("slab_undisturbed: thickness must be positive");
  if (x3 < 0 || x3 > H) throw DomainError("slab_undisturbed: x3 outside [0, H]");
  if (t < 0) throw DomainError("slab_undisturbed: t must be >= 0");
  UndisturbedField out;
  const double al = mat.alpha;
  if (t == 0) {
    // zero start; the boundary rows carry the prescribed values
    if (x3 == H) out.d[0] = top.at(0);
    else if (x3 == 0) out.d[0] = bottom;
    return out;
  }
  const bool sine = top.kind == TopLoad::Kind::Sine;
  const double T = sine ? 0.0 : top.value;
  const double B = bottom;

  // quasi-steady part
  out.d[0] = B + (T - B) * x3 / H;
  out.d[1] = (T - B) / H;
  cplx A(top.amplitude, 0), kappa;
  double omega = 0;
  if (sine && top.amplitude != 0) {
    omega = 2 * M_PI / top.period;
    kappa = std::sqrt(cplx(0, omega / al));
    cplx e = std::exp(cplx(0, omega * t)) / std::sinh(kappa * H);
    cplx sh = std::sinh(kappa * x3), ch = std::cosh(kappa * x3);
    for (int k = 0; k < 4; ++k) {
      cplx dk = std::pow(kappa, k) * (k % 2 == 0 ? sh : ch);
      out.d[k] += (A * e * dk).imag();
      out.dt[k] += (A * e * dk * cplx(0, omega)).imag();
    }
  }

  // decaying eigenfunction series correcting the zero start
  const double scale = std::abs(T) + std::abs(B) + std::abs(top.amplitude) + 1e-300;
  for (int n = 1; n <= 200000; ++n) {
    double mu = n * M_PI / H, sg = (n % 2) ? -1.0 : 1.0;
    double c = (2 * B / (H * mu)) * -1.0 + (2 * T / (H * mu)) * sg;
    if (sine && top.amplitude != 0) c += (2 / H) * (A * mu * sg / (kappa * kappa + mu * mu)).imag();
    double decay = std::exp(-al * mu * mu * t);
    for (int k = 0; k < 4; ++k) {
      double s = c * decay * dsin(mu, x3, k);
      out.d[k] += s;
      out.dt[k] += -al * mu * mu * s;
    }
    out.terms = n;
    // the bound μ^5 |c| e^{-αμ²t} covers every returned derivative and is
    // decreasing in n once αμ²t > 5/2
    double bound = std::pow(mu, 5) * std::abs(c) * decay;
    double bound0 = 2 * scale / (H * mu) * decay;
    if (al * mu * mu * t > 2.5 && bound < 1e-13 * scale && bound0 < 1e-10) break;
  }
  return out;
}

}  // namespace eshelby

#include "eshelby/specfun.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <vector>

#include "eshelby/errors.hpp"

namespace eshelby {

namespace {

struct Workspace {
  gsl_integration_workspace* w = nullptr;
  size_t size = 0;
  ~Workspace() {
    if (w) gsl_integration_workspace_free(w);
  }
  gsl_integration_workspace* get(size_t n) {
    if (n > size) {
      if (w) gsl_integration_workspace_free(w);
      w = gsl_integration_workspace_alloc(n);
      size = n;
    }
    return w;
  }
};

double trampoline(double x, void* p) {
  return (*static_cast<const std::function<double(double)>*>(p))(x);
}

bool is_half_integer(double s) {
  double t = 2.0 * s;
  return std::abs(t - std::round(t)) < 1e-14 && std::abs(std::fmod(std::round(t), 2.0)) == 1.0;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (max_subdivisions < 1) throw PreconditionError("QuadratureSpec: max_subdivisions < 1");
  if (abs_tol < 0 || rel_tol < 0) throw PreconditionError("QuadratureSpec: negative tolerance");
  if (abs_tol == 0 && rel_tol == 0) throw PreconditionError("QuadratureSpec: both tolerances zero");
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& q, double* err_est) {
  q.validate();
  if (a == b) {
    if (err_est) *err_est = 0.0;
    return 0.0;
  }
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  // one workspace per nesting depth so integrands may call integrate themselves
  thread_local std::vector<std::unique_ptr<Workspace>> stack;
  thread_local size_t depth = 0;
  if (stack.size() <= depth) stack.push_back(std::make_unique<Workspace>());
  Workspace& ws = *stack[depth];
  struct Guard {
    size_t& d;
    explicit Guard(size_t& d_) : d(d_) { ++d; }
    ~Guard() { --d; }
  } guard(depth);
  gsl_function F;
  F.function = &trampoline;
  F.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0, err = 0;
  size_t lim = static_cast<size_t>(q.max_subdivisions);
  int status = gsl_integration_qag(&F, a, b, q.abs_tol, q.rel_tol, lim, GSL_INTEG_GAUSS21,
                                   ws.get(lim), &result, &err);
  if (err_est) *err_est = err;
  if (status != GSL_SUCCESS) {
    // roundoff-limited but tiny error estimates are fine
    double want = std::max(q.abs_tol, q.rel_tol * std::abs(result));
    if (status == GSL_EROUND && err <= 100.0 * want) return result;
    throw AccuracyError(std::string("adaptive quadrature: ") + gsl_strerror(status), err);
  }
  return result;
}

double erf(double x) {
  if (!std::isfinite(x)) {
    if (std::isinf(x)) return x > 0 ? 1.0 : -1.0;
    throw DomainError("erf: non-finite argument");
  }
  return std::erf(x);
}

double erfc(double x) {
  if (std::isnan(x)) throw DomainError("erfc: NaN argument");
  return std::erfc(x);
}

double half_gamma(double s) {
  if (!is_half_integer(s)) throw UnsupportedOrder("half_gamma: s must be a half-integer");
  return std::tgamma(s);
}

double upper_gamma(double s, double x) {
  if (!(s == 0.5 || s == -0.5 || s == -1.5 || s == -2.5))
    throw UnsupportedOrder("upper_gamma: s must be one of 1/2, -1/2, -3/2, -5/2");
  if (std::isnan(x) || x < 0) throw DomainError("upper_gamma: x must be >= 0");
  if (x == 0) return s > 0 ? std::sqrt(M_PI) : INFINITY;
  if (std::isinf(x)) return 0.0;

  if (x < 1.5) {
    // downward recurrence Γ(s,x) = (Γ(s+1,x) - x^s e^{-x}) / s from Γ(1/2,x)
    double g = std::sqrt(M_PI) * std::erfc(std::sqrt(x));
    for (double t = -0.5; t >= s - 1e-12; t -= 1.0) g = (g - std::pow(x, t) * std::exp(-x)) / t;
    return g;
  }
  // Legendre continued fraction, modified Lentz
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + s * std::log(x)) * h;
}

double gauss_2f1(double a, double b, double c, double x, const QuadratureSpec& q) {
  if (!(c > 0)) throw UnsupportedArgument("gauss_2f1: c must be positive");
  if (std::isnan(x) || x > 0) throw DomainError("gauss_2f1: x must be <= 0");
  if (x == 0) return 1.0;

  auto terminating = [](double a_, double nb, double c_, double z) {
    // nb is a non-positive integer: sum_k (a)_k (nb)_k / (c)_k z^k / k!
    int n = static_cast<int>(-std::round(nb));
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < n; ++k) {
      term *= (a_ + k) * (nb + k) / ((c_ + k) * (k + 1)) * z;
      sum += term;
    }
    return sum;
  };

  if (b <= 0 && b == std::round(b)) return terminating(a, b, c, x);
  if (a <= 0 && a == std::round(a)) return terminating(b, a, c, x);

  double m = b - 1.5;
  bool family = a == 1.0 && c == 1.5 && m >= 0 && m == std::round(m);
  if (!family) throw UnsupportedArgument("gauss_2f1: argument family not supported");

  // Pfaff: 2F1(1, b; 3/2; x) = (1-x)^{-b} 2F1(1/2, b; 3/2; z), z = x/(x-1) in [0,1),
  // then the Euler integral in t = u^2: 2F1(1/2, b; 3/2; z) = ∫_0^1 (1 - z u^2)^{-b} du
  double z = x / (x - 1.0);
  auto f = [&](double u) { return std::pow((1.0 - z * u * u) * (1.0 - x), -b); };
  return integrate(f, 0.0, 1.0, q);
}

double appell_f1(double a, double b1, double b2, double c, double x, double y,
                 const QuadratureSpec& q) {
  if (a != 0.5 || c != 1.5) throw UnsupportedArgument("appell_f1: only a = 1/2, c = 3/2");
  if (b2 != 1.0) throw UnsupportedArgument("appell_f1: only b2 = 1");
  if (!(b1 <= 0) || std::abs(2 * b1 - std::round(2 * b1)) > 1e-14)
    throw UnsupportedArgument("appell_f1: b1 must be a non-positive half-integer or integer");
  if (std::isnan(x) || std::isnan(y) || x > 0 || y > 0)
    throw DomainError("appell_f1: x and y must be <= 0");
  if (x == 0 && y == 0) return 1.0;
  // Γ(3/2)/(Γ(1/2)Γ(1)) ∫_0^1 t^{-1/2} (1-xt)^{-b1} (1-yt)^{-b2} dt with t = u^2
  auto f = [&](double u) {
    double t = u * u;
    return std::pow(1.0 - x * t, -b1) * std::pow(1.0 - y * t, -b2);
  };
  return integrate(f, 0.0, 1.0, q);
}

double edge_D_hypergeometric(double a, double b, double lp, double lm, int q, const QuadratureSpec& spec) {
  if (b == 0) throw DomainError("edge_D_hypergeometric: b must be nonzero");
  if (q < 1) throw UnsupportedOrder("edge_D_hypergeometric: q must be >= 1");
  double rho2 = a * a + b * b;
  auto prim = [&](double l) {
    if (l == 0) return 0.0;
    double f1 = appell_f1(0.5, -0.5 * q, 1.0, 1.5, -l * l / rho2, -l * l / (b * b), spec);
    return l * std::pow(rho2, 0.5 * q) / b * f1 - std::pow(std::abs(a), q) * std::atan(l / b);
  };
  return prim(lp) - prim(lm);
}

}  // namespace eshelby

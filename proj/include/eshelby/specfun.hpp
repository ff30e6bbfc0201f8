#pragma once

#include <functional>

namespace eshelby {

struct QuadratureSpec {
  int max_subdivisions = 2000;
  double abs_tol = 1e-14;
  double rel_tol = 1e-10;
  void validate() const;
};

/// Adaptive 21-point Gauss-Kronrod on [a, b]. Throws AccuracyError when the
/// tolerance is not met within max_subdivisions.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& q = {}, double* err_est = nullptr);

double erf(double x);
double erfc(double x);

/// Γ(s, x) for s in {1/2, -1/2, -3/2, -5/2}, x >= 0.
double upper_gamma(double s, double x);

/// Γ(s) for the half-integers used by the singular time branch.
double half_gamma(double s);

/// 2F1(a, b; c; x) for x <= 0. Supported: b a non-positive integer
/// (terminating), or (a, c) = (1, 3/2) with b = 3/2 + m, m = 0, 1, ...
double gauss_2f1(double a, double b, double c, double x, const QuadratureSpec& q = {});

/// Appell F1(1/2; b1, 1; 3/2; x, y) for x, y <= 0, via the Euler integral
/// with t = u^2.
double appell_f1(double a, double b1, double b2, double c, double x, double y,
                 const QuadratureSpec& q = {});

/// One edge term D_q = ∫_{l-}^{l+} (R^q - |a|^q) b / (b^2 + l^2) dl written through
/// Appell F1(1/2; -q/2, 1; 3/2; -l^2/ρ^2, -l^2/b^2). Independent of the closed-form
/// recursions in polyint.hpp and used to cross-check them. Requires b != 0, q >= 1.
double edge_D_hypergeometric(double a, double b, double l_plus, double l_minus, int q,
                             const QuadratureSpec& spec = {});

}  // namespace eshelby

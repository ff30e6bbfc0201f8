#pragma once

#include "eshelby/transient.hpp"

namespace eshelby {

// Closed-form domain integrals of G over a ball of radius a centred at the origin.

// (1/Cp) ∫_ball G(x - x', t) dx' at radial distance r
double sphere_L(double a, double r, double t, const Material& mat);

// antiderivative in the lag τ: dE^n/dτ = (2ατ)^n sphere_L, with E^n(r, 0) the steady
// potentials; C^{n,f} = E^n(τ2) - E^n(τ1)
double sphere_E(double a, double r, double tau, const Material& mat, int n);

template <int K>
Jet<double, 3, K> sphere_L_jet(double a, const Vec3& x, double t, const Material& mat);

template <int K>
std::array<Jet<double, 3, K>, 3> sphere_C_jets(double a, const Vec3& x, LagWindow w, const Material& mat);

// TensorSet of one window for the ball, same conventions as assemble_tensors
TensorSet sphere_tensor_set(double a, const Vec3& x, LagWindow w, const Material& mat);

struct Ellipsoid {
  double a1 = 1, a2 = 1, a3 = 1;
  void validate() const;
  bool contains(const Vec3& x) const;
};

struct ShellQuadrature {
  int n_theta = 16;
  int n_gamma = 16;
  int max_doublings = 8;
  double rel_tol = 1e-6;
  void validate() const;
};

// (1/Cp) ∫_ellipsoid G dx' through the single-branch shell integral over directions e
double ellipsoid_L(const Ellipsoid& ell, const Vec3& x, double t, const Material& mat,
                   const ShellQuadrature& quad = {});

}  // namespace eshelby

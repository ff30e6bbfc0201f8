#pragma once

#include <array>
#include <vector>

#include "eshelby/geometry.hpp"
#include "eshelby/jet.hpp"

namespace eshelby {

using Mat3 = Eigen::Matrix3d;
using Arr27 = std::array<double, 27>;  // [i][p][q] -> i*9 + p*3 + q
using Arr81 = std::array<double, 81>;

struct SeriesParams {
  int n_max = 10;
  void validate() const;
};

struct TimeGrid {
  double t0 = 0;
  double dt = 1;
  int steps = 1;
  double t(int f) const { return t0 + f * dt; }
  void validate() const;
};

struct EigenCoeffs {
  double Q0 = 0;
  Vec3 Q1 = Vec3::Zero();
  Mat3 Q2 = Mat3::Zero();
  Vec3 U0 = Vec3::Zero();
  Mat3 U1 = Mat3::Zero();  // (i, p)
  Arr27 U2{};              // (i, p, q)
};

// Time tensors of one source window at one field point, physical sign:
// u = Σ_f Q·L̄ + u*·D̄. Gradient arrays append the derivative index last.
struct TensorSet {
  double L = 0;
  Vec3 Lp = Vec3::Zero();
  Mat3 Lpq = Mat3::Zero();
  Vec3 Di = Vec3::Zero();
  Mat3 Dip = Mat3::Zero();
  Arr27 Dipq{};

  Vec3 dL = Vec3::Zero();   // [m]
  Mat3 dLp = Mat3::Zero();  // [p][m]
  Arr27 dLpq{};             // [p][q][m]
  Mat3 dDi = Mat3::Zero();  // [i][m]
  Arr27 dDip{};             // [i][p][m]
  Arr81 dDipq{};            // [i][p][q][m]

  double contract(const EigenCoeffs& c) const;
  Vec3 contract_grad(const EigenCoeffs& c) const;
};

// Source window in lag variables: tau1 = t - t_f, tau2 = t - t_prev.
// tau1 == 0 selects the steady-limit branch.
struct LagWindow {
  double tau1 = 0;
  double tau2 = 0;
};

// ---- spatial tensor (source at a single instant, tau = t - t') ----

double spatial_L(const Polyhedron& poly, const Vec3& x, double tau, const Material& mat,
                 const SeriesParams& sp = {}, Flags* flags = nullptr);
Vec3 grad_spatial_L(const Polyhedron& poly, const Vec3& x, double tau, const Material& mat,
                    const SeriesParams& sp = {}, Flags* flags = nullptr);

// value and derivatives up to order K of the spatial L, as a jet in (x - x0)
template <int K>
Jet<double, 3, K> spatial_L_jet(const Polyhedron& poly, const Vec3& x, double tau, const Material& mat,
                                const SeriesParams& sp = {}, Flags* flags = nullptr);

// ---- time-integrated C^{n,f} ----

double C_nf(const Polyhedron& poly, const Vec3& x, double t, double t_prev, double t_f, int n,
            const Material& mat, const SeriesParams& sp = {}, Flags* flags = nullptr);
Vec3 grad_C_nf(const Polyhedron& poly, const Vec3& x, double t, double t_prev, double t_f, int n,
               const Material& mat, const SeriesParams& sp = {}, Flags* flags = nullptr);

struct HigherDerivs {
  int order = 2;
  Mat3 d2 = Mat3::Zero();
  Arr27 d3{};
};
HigherDerivs higher_derivs_C(const Polyhedron& poly, const Vec3& x, double t, double t_prev, double t_f,
                             int n, const Material& mat, const SeriesParams& sp, int order,
                             Flags* flags = nullptr);

// C^0, C^1, C^2 of one lag window as jets of degree K about x
template <int K>
std::array<Jet<double, 3, K>, 3> C_jets(const Polyhedron& poly, const Vec3& x, LagWindow w,
                                        const Material& mat, const SeriesParams& sp = {},
                                        Flags* flags = nullptr);

// Builds the tensor families (with one gradient index) from C^n jets of degree >= 4
template <int K>
TensorSet tensors_from_C(const std::array<Jet<double, 3, K>, 3>& C, const Vec3& x, const Material& mat);

// Positive-sign L⁺ family as jets (L⁺ = -L̄); D̄ = -K ∂_i L⁺.
template <int K>
struct LplusJets {
  Jet<double, 3, K> L;
  std::array<Jet<double, 3, K>, 3> Lp;
  std::array<std::array<Jet<double, 3, K>, 3>, 3> Lpq;
};
template <int K>
LplusJets<K> lplus_from_C(const std::array<Jet<double, 3, K>, 3>& C, const Vec3& x);

// window of step f (1-based) of the grid as seen at time t; returns false when t <= t_{f-1}
bool window_at(const TimeGrid& grid, int f, double t, LagWindow& w);

TensorSet assemble_tensors(const Polyhedron& poly, const Vec3& x, double t, int f, const TimeGrid& grid,
                           const Material& mat, const SeriesParams& sp = {}, Flags* flags = nullptr);

// coeffs[f-1] holds the coefficients of window f
double temperature(const Polyhedron& poly, const Vec3& x, double t, const std::vector<EigenCoeffs>& coeffs,
                   const TimeGrid& grid, const Material& mat, const SeriesParams& sp = {},
                   Flags* flags = nullptr);
Vec3 flux(const Polyhedron& poly, const Vec3& x, double t, const std::vector<EigenCoeffs>& coeffs,
          const TimeGrid& grid, const Material& mat, const SeriesParams& sp = {}, Flags* flags = nullptr);

// ---- shared scalar helpers ----

// e^{-v} - Σ_{m<=N} (-v)^m / m!, stable for small v
double gauss_tail(double v, int N);

}  // namespace eshelby

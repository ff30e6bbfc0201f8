#pragma once

#include <complex>
#include <optional>

#include "eshelby/transient.hpp"

namespace eshelby {

using cplx = std::complex<double>;
using Vec3c = Eigen::Vector3cd;
using Mat3c = Eigen::Matrix3cd;

struct HarmonicParams {
  cplx beta{0, 0};
  std::optional<double> omega;  // when set, beta^2 must equal i omega / alpha

  // beta = sqrt(i omega / alpha) on the decaying branch
  static HarmonicParams from_omega(double omega, double alpha);
  void validate(double alpha = 0) const;
};

// A^n(x) = ∫_Ω e^{iβr} r^{n-1} dx', n = 0, 1, 2
cplx A_n(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp, int n, const SeriesParams& sp = {20});
Vec3c grad_A_n(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp, int n,
               const SeriesParams& sp = {20});

// A^n as a complex jet of degree K about x
template <int K>
Jet<cplx, 3, K> A_n_jet(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp, int n,
                        const SeriesParams& sp = {20});

// Φ = ∫ e^{iβr}/r, Φ_p = ∫ x'_p e^{iβr}/r, Φ_pq = ∫ x'_p x'_q e^{iβr}/r and their gradients
struct PhiTensors {
  cplx Phi{};
  Vec3c Phi_p = Vec3c::Zero();
  Mat3c Phi_pq = Mat3c::Zero();
  Vec3c dPhi = Vec3c::Zero();    // [i]
  Mat3c dPhi_p = Mat3c::Zero();  // [p][i]
  std::array<cplx, 27> dPhi_pq{};  // [p][q][i]
};
PhiTensors phi_tensors(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp,
                       const SeriesParams& sp = {20});

// L^H = Φ/(4πK), D^H_i = -Φ_,i/(4π) for each polynomial order
struct HarmonicTensors {
  cplx L{};
  Vec3c Lp = Vec3c::Zero();
  Mat3c Lpq = Mat3c::Zero();
  Vec3c Di = Vec3c::Zero();
  Mat3c Dip = Mat3c::Zero();      // [i][p]
  std::array<cplx, 27> Dipq{};    // [i][p][q]
};
HarmonicTensors harmonic_eshelby(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp,
                                 const Material& mat, const SeriesParams& sp = {20});

}  // namespace eshelby

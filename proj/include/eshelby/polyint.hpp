#pragma once

// Per-edge primitives of the transformed-coordinate reduction and the per-face
// sums built from them. Everything is templated on the number type so the same
// code yields values (double) or full derivative jets (Jet<...>).
//
// For a face with outward normal xi and an edge from v- to v+:
//   a = (x - v+).xi, b = (x - v+).lambda, l(+/-) = (x - v+/-).eta, R^2 = a^2 + b^2 + l^2
//   dtheta = atan(l+/b) - atan(l-/b)
//   D_q    = ∫_{l-}^{l+} (R^q - |a|^q) b / (b^2 + l^2) dl
// so that ∫_F R^p dA = Σ_J D_{p+2}/(p+2) and ∫_Ω r^p = -Σ_I a_I Σ_J D_{p+2}/((p+2)(p+3)).

#include <cmath>
#include <vector>

#include "eshelby/geometry.hpp"
#include "eshelby/jet.hpp"

namespace eshelby {

template <class T>
struct FaceSum {
  T a{};                // signed distance to the face plane
  T theta{};            // Σ_J dtheta (2π inside the face projection, 0 outside)
  std::vector<T> D;     // Σ_J D_q, q = 0..qmax
};

// D_q for one edge; D must be sized qmax+1. Odd entries above qmax_odd are left 0.
template <class T>
void edge_primitives(const T& a, const T& b, const T& lp, const T& lm, int qmax_even, int qmax_odd,
                     T& dtheta, std::vector<T>& D) {
  using std::asinh;
  using std::atan;
  using std::sqrt;
  const T a2 = a * a, b2 = b * b;
  const T rho2 = a2 + b2;
  dtheta = atan2(b * (lp - lm), b2 + lp * lm);

  // even chain: J_0 = l+ - l-, J_m = [l R^m]/(m+1) + m rho2/(m+1) J_{m-2}
  if (qmax_even >= 2) {
    const T Rp2 = rho2 + lp * lp, Rm2 = rho2 + lm * lm;
    T J = lp - lm;
    T pp = lp, pm = lm;  // l R^m at both ends
    T Dprev = b * J;     // D_2
    D[2] += Dprev;
    for (int q = 4; q <= qmax_even; q += 2) {
      int m = q - 2;
      pp = pp * Rp2;
      pm = pm * Rm2;
      J = (pp - pm) / double(m + 1) + (double(m) / double(m + 1)) * rho2 * J;
      Dprev = b * J + a2 * Dprev;
      D[q] += Dprev;
    }
  }

  if (qmax_odd >= 1) {
    const T rho = sqrt(rho2);
    const T Rp = sqrt(rho2 + lp * lp), Rm = sqrt(rho2 + lm * lm);
    const T aa = abs(a);
    T J = asinh(lp / rho) - asinh(lm / rho);  // J_{-1}
    // atan(x) - atan(y) folded into one arctangent; no cancellation near |a| = R
    auto Tf = [&](const T& l, const T& R) {
      return -atan(l * b * (b2 + l * l) / ((aa + R) * (b2 * R + aa * l * l)));
    };
    T Dprev = b * J + aa * (Tf(lp, Rp) - Tf(lm, Rm));  // D_1
    D[1] += Dprev;
    T pp = lp * Rp, pm = lm * Rm;
    for (int q = 3; q <= qmax_odd; q += 2) {
      int m = q - 2;  // odd, >= 1
      if (m > 1) {
        pp = pp * (rho2 + lp * lp);
        pm = pm * (rho2 + lm * lm);
      }
      J = (pp - pm) / double(m + 1) + (double(m) / double(m + 1)) * rho2 * J;
      Dprev = b * J + a2 * Dprev;
      D[q] += Dprev;
    }
  }
}

// x is supplied as three values of type T (plain coordinates or jet variables).
template <class T>
std::vector<FaceSum<T>> face_sums(const Polyhedron& poly, const T x[3], int qmax_even, int qmax_odd) {
  int qmax = std::max(qmax_even, qmax_odd);
  std::vector<FaceSum<T>> out(poly.num_faces());
  const auto& V = poly.vertices();
  for (size_t f = 0; f < poly.num_faces(); ++f) {
    const auto& loop = poly.faces()[f];
    const Vec3& xi = poly.normal(f);
    FaceSum<T>& fs = out[f];
    fs.D.assign(qmax + 1, T(0.0));
    const Vec3& v0 = V[loop[0]];
    fs.a = (x[0] - v0.x()) * xi.x() + (x[1] - v0.y()) * xi.y() + (x[2] - v0.z()) * xi.z();
    fs.theta = T(0.0);
    for (size_t e = 0; e < loop.size(); ++e) {
      const Vec3& vm = V[loop[e]];
      const Vec3& vp = V[loop[(e + 1) % loop.size()]];
      Vec3 eta = (vp - vm).normalized();
      Vec3 lam = eta.cross(xi);
      T dx[3] = {x[0] - vp.x(), x[1] - vp.y(), x[2] - vp.z()};
      T b = dx[0] * lam.x() + dx[1] * lam.y() + dx[2] * lam.z();
      T lp = dx[0] * eta.x() + dx[1] * eta.y() + dx[2] * eta.z();
      T lm = lp + (vp - vm).dot(eta);
      T dth;
      edge_primitives(fs.a, b, lp, lm, qmax_even, qmax_odd, dth, fs.D);
      fs.theta += dth;
    }
  }
  return out;
}

// ∫_Ω r^p dx' for p = -1, 0, 1, ... from face sums (needs D up to p+2)
template <class T>
T volume_moment(const Polyhedron&, const std::vector<FaceSum<T>>& fsum, int p) {
  T s(0.0);
  for (size_t f = 0; f < fsum.size(); ++f) s += fsum[f].a * fsum[f].D[p + 2];
  return s * (-1.0 / double((p + 2) * (p + 3)));
}

// ∫_F R^p dA for p >= -1
template <class T>
T face_moment(const FaceSum<T>& fs, int p) {
  return fs.D[p + 2] * (1.0 / double(p + 2));
}

}  // namespace eshelby

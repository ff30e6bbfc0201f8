#include "eshelby/harmonic.hpp"

#include <cmath>

#include "eshelby/polyint.hpp"

namespace eshelby {

HarmonicParams HarmonicParams::from_omega(double omega, double alpha) {
  if (!(alpha > 0)) throw PreconditionError("from_omega: alpha must be positive");
  HarmonicParams hp;
  hp.beta = std::sqrt(cplx(0, omega / alpha));
  hp.omega = omega;
  return hp;
}

void HarmonicParams::validate(double alpha) const {
  if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag())) throw PreconditionError("beta not finite");
  if (beta.imag() < 0) throw PreconditionError("HarmonicParams: Im(beta) must be >= 0");
  if (omega && alpha > 0) {
    cplx want(0, *omega / alpha);
    if (std::abs(beta * beta - want) > 1e-10 * std::abs(beta * beta))
      throw PreconditionError("HarmonicParams: beta^2 != i omega / alpha");
  }
}

namespace {

// Complex jets of A^0..A^{n_hi}, degree K.
template <int K>
std::array<Jet<cplx, 3, K>, 3> a_jets(const Polyhedron& poly, const Vec3& x0, const HarmonicParams& hp, int n_hi,
                                      const SeriesParams& sp) {
  hp.validate();
  sp.validate();
  using R = Jet<double, 3, K>;
  using G = Jet<double, 3, K - 1>;
  using C = Jet<cplx, 3, K>;
  std::array<C, 3> out{};
  if (poly.num_faces() == 0) return out;
  Vec3 x = prepare_point(poly, x0, nullptr);
  const int N = sp.n_max;
  const int pmax = N + n_hi - 1;  // highest moment r^p
  const int q = pmax + 2;

  double xs[3] = {x.x(), x.y(), x.z()};
  auto fs = face_sums<double>(poly, xs, q, q);
  G xg[3] = {G::variable(0, x.x()), G::variable(1, x.y()), G::variable(2, x.z())};
  auto fg = face_sums<G>(poly, xg, q, q);

  std::vector<R> V(pmax + 2);  // V[p + 1]
  for (int p = -1; p <= pmax; ++p) {
    std::array<G, 3> g{};
    for (size_t f = 0; f < fg.size(); ++f) {
      G F = face_moment(fg[f], p);
      for (int i = 0; i < 3; ++i) g[i] -= F * poly.normal(f)[i];
    }
    V[p + 1] = from_gradient<double, K>(volume_moment(poly, fs, p), g);
  }

  const cplx ib = cplx(0, 1) * hp.beta;
  for (int n = 0; n <= n_hi; ++n) {
    C sum{};
    cplx w = 1;
    double prev = 0, last = 0;
    for (int m = 0; m <= N; ++m) {
      if (m) w *= ib / double(m);
      C term = C(V[m + n]) * w;
      sum += term;
      prev = last;
      last = std::abs(term.c[0]);
    }
    if (N >= 2 && last > prev && last > 1e-8 * std::abs(sum.c[0]))
      throw AccuracyError("A_n series terms still growing at n_max", last);
    out[n] = sum;
  }
  return out;
}

void check_order(int n) {
  if (n < 0 || n > 2) throw UnsupportedOrder("A_n: n must be 0, 1 or 2");
}

}  // namespace

template <int K>
Jet<cplx, 3, K> A_n_jet(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp, int n,
                        const SeriesParams& sp) {
  check_order(n);
  return a_jets<K>(poly, x, hp, n, sp)[n];
}
template Jet<cplx, 3, 1> A_n_jet<1>(const Polyhedron&, const Vec3&, const HarmonicParams&, int, const SeriesParams&);
template Jet<cplx, 3, 2> A_n_jet<2>(const Polyhedron&, const Vec3&, const HarmonicParams&, int, const SeriesParams&);
template Jet<cplx, 3, 3> A_n_jet<3>(const Polyhedron&, const Vec3&, const HarmonicParams&, int, const SeriesParams&);

cplx A_n(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp, int n, const SeriesParams& sp) {
  return A_n_jet<1>(poly, x, hp, n, sp).c[0];
}

Vec3c grad_A_n(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp, int n, const SeriesParams& sp) {
  auto j = A_n_jet<1>(poly, x, hp, n, sp);
  return Vec3c(j.c[1], j.c[2], j.c[3]);
}

PhiTensors phi_tensors(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp, const SeriesParams& sp) {
  using C = Jet<cplx, 3, 3>;
  PhiTensors r;
  if (poly.num_faces() == 0) return r;
  if (hp.beta == cplx(0)) throw PreconditionError("phi_tensors: beta must be nonzero");
  auto A = a_jets<3>(poly, x, hp, 2, sp);
  const cplx I(0, 1), b = hp.beta;
  auto xmul = [&](const C& a, int p) { return a * cplx(x[p]) + mul_var(a, p); };
  std::array<C, 3> dA1;
  for (int p = 0; p < 3; ++p) dA1[p] = diff(A[1], p);
  auto grad = [](const C& j, int i) { return j.c[1 + i]; };

  r.Phi = A[0].c[0];
  for (int i = 0; i < 3; ++i) r.dPhi[i] = grad(A[0], i);
  for (int p = 0; p < 3; ++p) {
    C Pp = xmul(A[0], p) + dA1[p] * (I / b);
    r.Phi_p[p] = Pp.c[0];
    for (int i = 0; i < 3; ++i) r.dPhi_p(p, i) = grad(Pp, i);
    for (int q = 0; q < 3; ++q) {
      C Pq = diff(diff(A[2], p), q) * (-1.0 / (b * b)) + diff(dA1[p], q) * (-I / (b * b * b)) +
             (xmul(dA1[q], p) + xmul(dA1[p], q)) * (I / b) + xmul(xmul(A[0], p), q);
      if (p == q) Pq += A[1] * (I / b);
      r.Phi_pq(p, q) = Pq.c[0];
      for (int i = 0; i < 3; ++i) r.dPhi_pq[p * 9 + q * 3 + i] = grad(Pq, i);
    }
  }
  return r;
}

HarmonicTensors harmonic_eshelby(const Polyhedron& poly, const Vec3& x, const HarmonicParams& hp,
                                 const Material& mat, const SeriesParams& sp) {
  mat.validate();
  hp.validate(mat.alpha);
  auto P = phi_tensors(poly, x, hp, sp);
  const double s = 1.0 / (4 * M_PI * mat.K), d = -1.0 / (4 * M_PI);
  HarmonicTensors h;
  h.L = P.Phi * s;
  h.Lp = P.Phi_p * s;
  h.Lpq = P.Phi_pq * s;
  for (int i = 0; i < 3; ++i) {
    h.Di[i] = P.dPhi[i] * d;
    for (int p = 0; p < 3; ++p) {
      h.Dip(i, p) = P.dPhi_p(p, i) * d;
      for (int q = 0; q < 3; ++q) h.Dipq[i * 9 + p * 3 + q] = P.dPhi_pq[p * 9 + q * 3 + i] * d;
    }
  }
  return h;
}

}  // namespace eshelby

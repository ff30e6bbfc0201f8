#include "eshelby/transient.hpp"

#include <cmath>

#include "eshelby/polyint.hpp"
#include "eshelby/specfun.hpp"

namespace eshelby {

void SeriesParams::validate() const {
  if (n_max < 0 || n_max > 60) throw PreconditionError("SeriesParams: n_max must be in [0, 60]");
}

void TimeGrid::validate() const {
  if (!(dt > 0)) throw PreconditionError("TimeGrid: dt must be positive");
  if (steps < 1) throw PreconditionError("TimeGrid: steps must be positive");
}

namespace {

double factorial(int k) {
  static const auto table = [] {
    std::array<double, 171> t{};
    t[0] = 1;
    for (int i = 1; i < 171; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table.at(k);
}

}  // namespace

double gauss_tail(double v, int N) {
  if (N < 0) return std::exp(-v);
  if (v < 1.0 + 0.5 * N) {
    // Σ_{m>N} (-v)^m/m!
    double term = 1, s = 0;
    for (int m = 1; m <= N + 1; ++m) term *= -v / m;
    for (int m = N + 1; m < N + 200; ++m) {
      s += term;
      if (std::abs(term) <= 1e-18 * std::abs(s)) break;
      term *= -v / (m + 1);
    }
    return s;
  }
  double T = 0, term = 1;
  for (int m = 0; m <= N; ++m) {
    T += term;
    term *= -v / (m + 1);
  }
  return std::exp(-v) - T;
}

namespace detail {

std::vector<double> gauss_tail_coeffs(double v0, int N, int deg) {
  std::vector<double> c(deg + 1);
  for (int k = 0; k <= deg; ++k) c[k] = (k % 2 ? -1.0 : 1.0) * gauss_tail(v0, N - k) / factorial(k);
  return c;
}

// Taylor coefficients about u0 of
//   H_N(u) = u^{2n+1} Γ(s, u^2) + Σ_{m<=N} (-1)^m u^{2m} / (m! (s+m)),  s = -n - 1/2
std::vector<double> hfun_coeffs(double u0, int n, int N, int deg) {
  const double s = -n - 0.5;
  std::vector<double> out(deg + 1, 0.0);
  if (u0 < 2.0) {
    // H_N(u) = Γ(s) u^{2n+1} - Σ_{k>N} (-1)^k u^{2k} / (k! (s+k))
    int K = N + 45;
    std::vector<double> p(2 * K + 1, 0.0);
    p[2 * n + 1] += std::tgamma(s);
    for (int k = N + 1; k <= K; ++k) p[2 * k] -= (k % 2 ? -1.0 : 1.0) / (factorial(std::min(k, 170)) * (s + k));
    // shift to u0: c_d = Σ_j p_j C(j,d) u0^{j-d}
    for (int d = 0; d <= deg; ++d) {
      double acc = 0;
      for (int j = (int)p.size() - 1; j >= d; --j) {
        // Horner in u0 over j with binomial weights
        double bin = 1;
        for (int i = 0; i < d; ++i) bin = bin * (j - i) / (i + 1);
        acc += p[j] * bin * std::pow(u0, j - d);
      }
      out[d] = acc;
    }
    return out;
  }
  size_t L = deg + 1;
  auto U = series::shifted_var(u0, L);
  // d/du Γ(s, u^2) = -2 u^{2s-1} e^{-u^2}
  auto w1 = series::pow(U, 2 * s - 1);
  std::vector<double> m2(L, 0.0);
  m2[0] = -u0 * u0;
  if (L > 1) m2[1] = -2 * u0;
  if (L > 2) m2[2] = -1;
  auto w2 = series::exp(m2);
  auto dg = series::mul(w1, w2);
  for (auto& v : dg) v *= -2.0;
  auto g = series::integral(dg, upper_gamma(s, u0 * u0));
  auto up = series::pow(U, 2.0 * n + 1);
  out = series::mul(g, up);
  // polynomial part
  for (int m = 0; m <= N; ++m) {
    double cm = (m % 2 ? -1.0 : 1.0) / (factorial(m) * (s + m));
    auto pm = series::pow(U, 2.0 * m);
    if (m == 0) pm.assign(L, 0.0), pm[0] = 1.0;
    for (size_t d = 0; d < L; ++d) out[d] += cm * pm[d];
  }
  return out;
}


template <class T>
struct jet_deg {
  static constexpr int value = 0;
};
template <class S, int NV, int D>
struct jet_deg<Jet<S, NV, D>> {
  static constexpr int value = D;
};

template <class T>
T apply_coeffs(const std::vector<double>& c, const T& u) {
  if constexpr (std::is_same_v<T, double>)
    return c[0];
  else
    return compose(c, u);
}

template <class T>
T ipow(const T& x, int k) {
  T r(1.0);
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}

// Per-face brackets. The gradient of the volume integral is
// -(prefactor / Cp) Σ_I xi_I X_I.

// spatial: ∫_F e^{-R²/c} dA = (c/2) X
template <class T>
T spatial_face(const FaceSum<T>& fs, double c, int N) {
  T v = fs.a * fs.a * (1.0 / c);
  T X = -apply_coeffs(gauss_tail_coeffs(value_of(v), N, jet_deg<T>::value), v) * fs.theta;
  double w = 1;
  for (int m = 1; m <= N; ++m) {
    w *= -1.0 / (m * c);
    X -= fs.D[2 * m] * w;
  }
  return X;
}

// time window: ∫ τ^{n-1/2} X_spatial(τ) dτ over [tau1, tau2]
template <class T>
T time_face(const FaceSum<T>& fs, LagWindow w, int n, int N, double alpha) {
  const double s = -n - 0.5, fa = 4 * alpha;
  const T aa = abs(fs.a);
  auto Y = [&](double tau) {
    T u = aa * (1.0 / std::sqrt(fa * tau));
    T r = apply_coeffs(hfun_coeffs(value_of(u), n, N, jet_deg<T>::value), u) * fs.theta *
          std::pow(tau, n + 0.5);
    double wk = 1;
    for (int k = 1; k <= N; ++k) {
      wk *= -1.0 / (k * fa);
      r += fs.D[2 * k] * (wk * std::pow(tau, n + 0.5 - k) / (s + k));
    }
    return r;
  };
  T X = Y(w.tau2);
  if (w.tau1 > 0)
    X -= Y(w.tau1);
  else
    X -= (ipow(aa, 2 * n + 1) * fs.theta + fs.D[2 * n + 1]) * (std::tgamma(s) * std::pow(fa, s));
  return X;
}

double time_face_prefactor(int n, const Material& mat) {
  return std::pow(2 * mat.alpha, n + 1) * std::pow(4 * M_PI * mat.alpha, -1.5) / mat.Cp;
}

void check_series(double last, double sum, Flags* flags) {
  if (flags && std::abs(last) > 1e-8 * std::abs(sum)) flags->series_unconverged = true;
}

double spatial_volume(const Polyhedron& poly, const std::vector<FaceSum<double>>& fs, double c, int N,
                      const Material& mat, Flags* flags) {
  double sum = 0, w = 1, last = 0;
  for (int m = 0; m <= N; ++m) {
    if (m) w *= -1.0 / (m * c);
    last = w * volume_moment(poly, fs, 2 * m);
    sum += last;
  }
  check_series(last, sum, flags);
  return sum * std::pow(M_PI * c, -1.5) / mat.Cp;
}

double time_volume(const Polyhedron& poly, const std::vector<FaceSum<double>>& fs, LagWindow w, int n, int N,
                   const Material& mat, Flags* flags) {
  const double fa = 4 * mat.alpha;
  std::vector<double> V(N + 1);
  for (int k = 0; k <= N; ++k) V[k] = volume_moment(poly, fs, 2 * k);
  double last = 0;
  auto Vreg = [&](double tau) {
    double sum = 0, wk = 1;
    for (int k = 0; k <= N; ++k) {
      if (k) wk *= -1.0 / (k * fa);
      last = wk * V[k] * std::pow(tau, n - 0.5 - k) / (n - 0.5 - k);
      sum += last;
    }
    return sum;
  };
  double sum = Vreg(w.tau2);
  if (w.tau1 > 0) {
    double lo = Vreg(w.tau1);
    sum -= lo;
  } else {
    sum += std::tgamma(0.5 - n) * std::pow(fa, 0.5 - n) * volume_moment(poly, fs, 2 * n - 1);
  }
  check_series(last, sum, flags);
  return sum * std::pow(2 * mat.alpha, n) * std::pow(4 * M_PI * mat.alpha, -1.5) / mat.Cp;
}

template <int D>
std::array<Jet<double, 3, D>, 3> jet_point(const Vec3& x) {
  return {Jet<double, 3, D>::variable(0, x.x()), Jet<double, 3, D>::variable(1, x.y()),
          Jet<double, 3, D>::variable(2, x.z())};
}

template <int K, class FaceFn>
std::array<Jet<double, 3, K - 1>, 3> gradient_jets(const Polyhedron& poly, const Vec3& x, int qe, int qo,
                                                   double pref, FaceFn&& face) {
  using G = Jet<double, 3, K - 1>;
  auto xs = jet_point<K - 1>(x);
  auto fs = face_sums<G>(poly, xs.data(), qe, qo);
  std::array<G, 3> g{};
  for (size_t f = 0; f < fs.size(); ++f) {
    G X = face(fs[f]);
    const Vec3& xi = poly.normal(f);
    for (int i = 0; i < 3; ++i) g[i] -= X * (pref * xi[i]);
  }
  return g;
}

}  // namespace detail

using namespace detail;

namespace {

void check_window(double t, double t_prev, double t_f) {
  if (!(t_prev < t_f)) throw IntervalError("source window requires t_prev < t_f");
  if (!std::isfinite(t) || !std::isfinite(t_prev) || !std::isfinite(t_f))
    throw PreconditionError("non-finite time");
}

void check_n(int n) {
  if (n < 0 || n > 2) throw UnsupportedOrder("time tensor order n must be 0, 1 or 2");
}

// lag window of [t_prev, t_f] seen at t; false when the source has not started
bool lag_window(double t, double t_prev, double t_f, LagWindow& w) {
  if (t <= t_prev) return false;
  double te = std::min(t_f, t);
  w.tau2 = t - t_prev;
  w.tau1 = t - te;
  if (w.tau1 < 1e-12 * w.tau2) w.tau1 = 0;
  return true;
}

int odd_order(const LagWindow& w, int n_hi) { return w.tau1 > 0 ? -1 : 2 * n_hi + 1; }

}  // namespace

double spatial_L(const Polyhedron& poly, const Vec3& x0, double tau, const Material& mat, const SeriesParams& sp,
                 Flags* flags) {
  sp.validate();
  if (tau <= 0 || poly.num_faces() == 0) return 0;
  Vec3 x = prepare_point(poly, x0, flags);
  double xs[3] = {x.x(), x.y(), x.z()};
  auto fs = face_sums<double>(poly, xs, 2 * sp.n_max + 2, -1);
  return spatial_volume(poly, fs, 4 * mat.alpha * tau, sp.n_max, mat, flags);
}

Vec3 grad_spatial_L(const Polyhedron& poly, const Vec3& x0, double tau, const Material& mat,
                    const SeriesParams& sp, Flags* flags) {
  sp.validate();
  if (tau <= 0 || poly.num_faces() == 0) return Vec3::Zero();
  auto j = spatial_L_jet<1>(poly, x0, tau, mat, sp, flags);
  return Vec3(j.c[1], j.c[2], j.c[3]);
}

template <int K>
Jet<double, 3, K> spatial_L_jet(const Polyhedron& poly, const Vec3& x0, double tau, const Material& mat,
                                const SeriesParams& sp, Flags* flags) {
  static_assert(K >= 1);
  sp.validate();
  if (tau <= 0 || poly.num_faces() == 0) return Jet<double, 3, K>(0.0);
  Vec3 x = prepare_point(poly, x0, flags);
  const int N = sp.n_max;
  const double c = 4 * mat.alpha * tau;
  double xs[3] = {x.x(), x.y(), x.z()};
  auto fs = face_sums<double>(poly, xs, 2 * N + 2, -1);
  double v = spatial_volume(poly, fs, c, N, mat, flags);
  double pref = 2 * mat.alpha * std::pow(4 * M_PI * mat.alpha, -1.5) / std::sqrt(tau) / mat.Cp;
  auto g = gradient_jets<K>(poly, x, 2 * N, -1, pref, [&](const auto& f) { return spatial_face(f, c, N); });
  return from_gradient<double, K>(v, g);
}

double C_nf(const Polyhedron& poly, const Vec3& x0, double t, double t_prev, double t_f, int n, const Material& mat,
            const SeriesParams& sp, Flags* flags) {
  check_window(t, t_prev, t_f);
  check_n(n);
  sp.validate();
  LagWindow w;
  if (!lag_window(t, t_prev, t_f, w) || poly.num_faces() == 0) return 0;
  Vec3 x = prepare_point(poly, x0, flags);
  double xs[3] = {x.x(), x.y(), x.z()};
  auto fs = face_sums<double>(poly, xs, 2 * sp.n_max + 2, odd_order(w, n));
  return time_volume(poly, fs, w, n, sp.n_max, mat, flags);
}

namespace {

template <int K>
Jet<double, 3, K> single_C_jet(const Polyhedron& poly, const Vec3& x0, LagWindow w, int n, const Material& mat,
                               const SeriesParams& sp, Flags* flags) {
  Vec3 x = prepare_point(poly, x0, flags);
  const int N = sp.n_max;
  double xs[3] = {x.x(), x.y(), x.z()};
  auto fs = face_sums<double>(poly, xs, 2 * N + 2, odd_order(w, n));
  double v = time_volume(poly, fs, w, n, N, mat, flags);
  auto g = gradient_jets<K>(poly, x, 2 * N, odd_order(w, n), time_face_prefactor(n, mat),
                            [&](const auto& f) { return time_face(f, w, n, N, mat.alpha); });
  return from_gradient<double, K>(v, g);
}

}  // namespace

Vec3 grad_C_nf(const Polyhedron& poly, const Vec3& x0, double t, double t_prev, double t_f, int n,
               const Material& mat, const SeriesParams& sp, Flags* flags) {
  check_window(t, t_prev, t_f);
  check_n(n);
  sp.validate();
  LagWindow w;
  if (!lag_window(t, t_prev, t_f, w) || poly.num_faces() == 0) return Vec3::Zero();
  auto j = single_C_jet<1>(poly, x0, w, n, mat, sp, flags);
  return Vec3(j.c[1], j.c[2], j.c[3]);
}

HigherDerivs higher_derivs_C(const Polyhedron& poly, const Vec3& x0, double t, double t_prev, double t_f, int n,
                             const Material& mat, const SeriesParams& sp, int order, Flags* flags) {
  check_window(t, t_prev, t_f);
  check_n(n);
  sp.validate();
  if (order != 2 && order != 3) throw UnsupportedOrder("higher_derivs_C: order must be 2 or 3");
  HigherDerivs h;
  h.order = order;
  LagWindow w;
  if (!lag_window(t, t_prev, t_f, w) || poly.num_faces() == 0) return h;
  auto fill = [&](const auto& j) {
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        std::array<int, 3> e{};
        ++e[i];
        ++e[k];
        h.d2(i, k) = j.deriv(e);
        if (order == 3)
          for (int m = 0; m < 3; ++m) {
            auto e3 = e;
            ++e3[m];
            h.d3[i * 9 + k * 3 + m] = j.deriv(e3);
          }
      }
  };
  if (order == 2)
    fill(single_C_jet<2>(poly, x0, w, n, mat, sp, flags));
  else
    fill(single_C_jet<3>(poly, x0, w, n, mat, sp, flags));
  return h;
}

template <int K>
std::array<Jet<double, 3, K>, 3> C_jets(const Polyhedron& poly, const Vec3& x0, LagWindow w, const Material& mat,
                                        const SeriesParams& sp, Flags* flags) {
  static_assert(K >= 1);
  sp.validate();
  if (!(w.tau2 > w.tau1) || w.tau1 < 0) throw IntervalError("C_jets: need 0 <= tau1 < tau2");
  std::array<Jet<double, 3, K>, 3> out{};
  if (poly.num_faces() == 0) return out;
  Vec3 x = prepare_point(poly, x0, flags);
  const int N = sp.n_max;
  const int qo = odd_order(w, 2);
  double xs[3] = {x.x(), x.y(), x.z()};
  auto fs = face_sums<double>(poly, xs, 2 * N + 2, qo);

  using G = Jet<double, 3, K - 1>;
  auto xj = jet_point<K - 1>(x);
  auto fj = face_sums<G>(poly, xj.data(), 2 * N, qo);
  for (int n = 0; n < 3; ++n) {
    double v = time_volume(poly, fs, w, n, N, mat, flags);
    double pref = time_face_prefactor(n, mat);
    std::array<G, 3> g{};
    for (size_t f = 0; f < fj.size(); ++f) {
      G X = time_face(fj[f], w, n, N, mat.alpha);
      const Vec3& xi = poly.normal(f);
      for (int i = 0; i < 3; ++i) g[i] -= X * (pref * xi[i]);
    }
    out[n] = from_gradient<double, K>(v, g);
  }
  return out;
}

template <int K>
LplusJets<K> lplus_from_C(const std::array<Jet<double, 3, K>, 3>& C, const Vec3& x) {
  using J = Jet<double, 3, K>;
  // multiplication by the absolute coordinate x_p = x0_p + δ_p
  auto xmul = [&](const J& a, int p) { return a * x[p] + mul_var(a, p); };
  std::array<J, 3> dC1;
  for (int p = 0; p < 3; ++p) dC1[p] = diff(C[1], p);
  LplusJets<K> r;
  r.L = C[0];
  for (int p = 0; p < 3; ++p) r.Lp[p] = dC1[p] + xmul(C[0], p);
  for (int p = 0; p < 3; ++p)
    for (int q = p; q < 3; ++q) {
      J v = diff(diff(C[2], p), q) + xmul(dC1[q], p) + xmul(dC1[p], q) + xmul(xmul(C[0], p), q);
      if (p == q) v += C[1];
      r.Lpq[p][q] = v;
      r.Lpq[q][p] = v;
    }
  return r;
}

namespace {

inline double d1(const auto& j, int m) { return j.c[1 + m]; }

}  // namespace

template <int K>
TensorSet tensors_from_C(const std::array<Jet<double, 3, K>, 3>& C, const Vec3& x, const Material& mat) {
  static_assert(K >= 4, "tensor gradients need fourth derivatives of C");
  auto P = lplus_from_C<K>(C, x);
  const double Kc = mat.K;
  TensorSet s;
  s.L = -P.L.c[0];
  for (int m = 0; m < 3; ++m) s.dL[m] = -d1(P.L, m);
  for (int p = 0; p < 3; ++p) {
    s.Lp[p] = -P.Lp[p].c[0];
    for (int m = 0; m < 3; ++m) s.dLp(p, m) = -d1(P.Lp[p], m);
    for (int q = 0; q < 3; ++q) {
      s.Lpq(p, q) = -P.Lpq[p][q].c[0];
      for (int m = 0; m < 3; ++m) s.dLpq[p * 9 + q * 3 + m] = -d1(P.Lpq[p][q], m);
    }
  }
  for (int i = 0; i < 3; ++i) {
    auto Di = diff(P.L, i);
    s.Di[i] = -Kc * Di.c[0];
    for (int m = 0; m < 3; ++m) s.dDi(i, m) = -Kc * d1(Di, m);
    for (int p = 0; p < 3; ++p) {
      auto Dip = diff(P.Lp[p], i);
      s.Dip(i, p) = -Kc * Dip.c[0];
      for (int m = 0; m < 3; ++m) s.dDip[i * 9 + p * 3 + m] = -Kc * d1(Dip, m);
      for (int q = 0; q < 3; ++q) {
        auto Dipq = diff(P.Lpq[p][q], i);
        s.Dipq[i * 9 + p * 3 + q] = -Kc * Dipq.c[0];
        for (int m = 0; m < 3; ++m) s.dDipq[i * 27 + p * 9 + q * 3 + m] = -Kc * d1(Dipq, m);
      }
    }
  }
  return s;
}

double TensorSet::contract(const EigenCoeffs& c) const {
  double u = c.Q0 * L + c.Q1.dot(Lp) + (c.Q2.array() * Lpq.array()).sum();
  u += c.U0.dot(Di) + (c.U1.array() * Dip.array()).sum();
  for (int k = 0; k < 27; ++k) u += c.U2[k] * Dipq[k];
  return u;
}

Vec3 TensorSet::contract_grad(const EigenCoeffs& c) const {
  Vec3 g = c.Q0 * dL + dLp.transpose() * c.Q1;
  for (int m = 0; m < 3; ++m) {
    double s = 0;
    for (int p = 0; p < 3; ++p) {
      s += c.U0[p] * dDi(p, m);
      for (int q = 0; q < 3; ++q) {
        s += c.Q2(p, q) * dLpq[p * 9 + q * 3 + m];
        s += c.U1(p, q) * dDip[p * 9 + q * 3 + m];
        for (int r = 0; r < 3; ++r) s += c.U2[p * 9 + q * 3 + r] * dDipq[p * 27 + q * 9 + r * 3 + m];
      }
    }
    g[m] += s;
  }
  return g;
}

bool window_at(const TimeGrid& grid, int f, double t, LagWindow& w) {
  grid.validate();
  if (f < 1 || f > grid.steps) throw PreconditionError("window_at: step index out of range");
  return lag_window(t, grid.t(f - 1), grid.t(f), w);
}

TensorSet assemble_tensors(const Polyhedron& poly, const Vec3& x, double t, int f, const TimeGrid& grid,
                           const Material& mat, const SeriesParams& sp, Flags* flags) {
  LagWindow w;
  if (!window_at(grid, f, t, w) || poly.num_faces() == 0) return TensorSet{};
  return tensors_from_C<4>(C_jets<4>(poly, x, w, mat, sp, flags), x, mat);
}

namespace {

template <class Fn>
void for_active_windows(const std::vector<EigenCoeffs>& coeffs, const TimeGrid& grid, double t, Fn&& fn) {
  if ((int)coeffs.size() > grid.steps) throw PreconditionError("more coefficient sets than grid steps");
  for (size_t f = 1; f <= coeffs.size(); ++f) {
    LagWindow w;
    if (!window_at(grid, (int)f, t, w)) break;
    fn(coeffs[f - 1], w);
  }
}

}  // namespace

double temperature(const Polyhedron& poly, const Vec3& x, double t, const std::vector<EigenCoeffs>& coeffs,
                   const TimeGrid& grid, const Material& mat, const SeriesParams& sp, Flags* flags) {
  double u = 0;
  if (poly.num_faces() == 0) return 0;
  for_active_windows(coeffs, grid, t, [&](const EigenCoeffs& c, LagWindow w) {
    u += tensors_from_C<4>(C_jets<4>(poly, x, w, mat, sp, flags), x, mat).contract(c);
  });
  return u;
}

Vec3 flux(const Polyhedron& poly, const Vec3& x, double t, const std::vector<EigenCoeffs>& coeffs,
          const TimeGrid& grid, const Material& mat, const SeriesParams& sp, Flags* flags) {
  Vec3 g = Vec3::Zero();
  if (poly.num_faces() == 0) return g;
  for_active_windows(coeffs, grid, t, [&](const EigenCoeffs& c, LagWindow w) {
    g += tensors_from_C<4>(C_jets<4>(poly, x, w, mat, sp, flags), x, mat).contract_grad(c);
  });
  return -mat.K * g;
}

#define ESHELBY_INST(K)                                                                                      \
  template Jet<double, 3, K> spatial_L_jet<K>(const Polyhedron&, const Vec3&, double, const Material&,       \
                                              const SeriesParams&, Flags*);                                  \
  template std::array<Jet<double, 3, K>, 3> C_jets<K>(const Polyhedron&, const Vec3&, LagWindow,             \
                                                      const Material&, const SeriesParams&, Flags*);         \
  template LplusJets<K> lplus_from_C<K>(const std::array<Jet<double, 3, K>, 3>&, const Vec3&);
ESHELBY_INST(1)
ESHELBY_INST(2)
ESHELBY_INST(3)
ESHELBY_INST(4)
ESHELBY_INST(5)
ESHELBY_INST(6)
#undef ESHELBY_INST
template TensorSet tensors_from_C<4>(const std::array<Jet<double, 3, 4>, 3>&, const Vec3&, const Material&);
template TensorSet tensors_from_C<5>(const std::array<Jet<double, 3, 5>, 3>&, const Vec3&, const Material&);
template TensorSet tensors_from_C<6>(const std::array<Jet<double, 3, 6>, 3>&, const Vec3&, const Material&);

}  // namespace eshelby

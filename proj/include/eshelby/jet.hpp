#pragma once

// Truncated multivariate Taylor polynomials ("jets"). A Jet<S, NV, D> holds the
// Taylor coefficients of a function of NV variables up to total degree D about
// some point. Arithmetic and elementary functions propagate the expansion, so
// evaluating a formula on jets yields all its partial derivatives up to order D.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <vector>

namespace eshelby {

namespace detail {

constexpr int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

template <int NV, int D>
struct JetLayout {
  static constexpr int N = binom(D + NV, NV);
  std::vector<std::array<int, NV>> exps;
  std::vector<int> degree;
  std::map<std::array<int, NV>, int> index;
  struct Triple {
    int i, j, k;
  };
  std::vector<Triple> mul;
  // shift[v][i] = index of exps[i] + e_v, or -1 when it exceeds D
  std::array<std::vector<int>, NV> shift;

  JetLayout() {
    for (int d = 0; d <= D; ++d) enumerate(d, 0, std::array<int, NV>{}, d);
    for (int i = 0; i < N; ++i) index[exps[i]] = i;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        if (degree[i] + degree[j] > D) continue;
        std::array<int, NV> e{};
        for (int v = 0; v < NV; ++v) e[v] = exps[i][v] + exps[j][v];
        mul.push_back({i, j, index.at(e)});
      }
    for (int v = 0; v < NV; ++v) {
      shift[v].assign(N, -1);
      for (int i = 0; i < N; ++i) {
        if (degree[i] == D) continue;
        auto e = exps[i];
        e[v] += 1;
        shift[v][i] = index.at(e);
      }
    }
  }

  static const JetLayout& get() {
    static const JetLayout layout;
    return layout;
  }

 private:
  void enumerate(int total, int v, std::array<int, NV> e, int left) {
    if (v == NV - 1) {
      e[v] = left;
      exps.push_back(e);
      degree.push_back(total);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[v] = k;
      enumerate(total, v + 1, e, left - k);
    }
  }
};

}  // namespace detail

template <class S, int NV, int D>
struct Jet {
  using Layout = detail::JetLayout<NV, D>;
  static constexpr int N = Layout::N;
  static constexpr int nvars = NV;
  static constexpr int degree = D;
  using scalar = S;

  std::array<S, N> c{};

  Jet() = default;
  Jet(S v) { c[0] = v; }  // NOLINT implicit on purpose: constants mix freely
  template <class S2>
  explicit Jet(const Jet<S2, NV, D>& o) {
    for (int i = 0; i < N; ++i) c[i] = S(o.c[i]);
  }

  static Jet variable(int v, S x0) {
    Jet j(x0);
    if (D >= 1) j.c[1 + v] = S(1);
    return j;
  }

  S value() const { return c[0]; }

  // Taylor coefficient of the monomial with exponents e
  S coef(const std::array<int, NV>& e) const {
    int deg = 0;
    for (int v : e) deg += v;
    if (deg > D) return S(0);
    return c[Layout::get().index.at(e)];
  }

  // partial derivative d^{|e|} f / dx^e at the expansion point
  S deriv(const std::array<int, NV>& e) const {
    double f = 1;
    for (int v : e)
      for (int k = 2; k <= v; ++k) f *= k;
    return coef(e) * f;
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  Jet& operator*=(S s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(S s) {
    for (auto& v : c) v /= s;
    return *this;
  }
  Jet operator-() const {
    Jet r;
    for (int i = 0; i < N; ++i) r.c[i] = -c[i];
    return r;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, S s) { return a.c[0] += s, a; }
  friend Jet operator+(S s, Jet a) { return a.c[0] += s, a; }
  friend Jet operator-(Jet a, S s) { return a.c[0] -= s, a; }
  friend Jet operator-(S s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, S s) { return a *= s; }
  friend Jet operator*(S s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, S s) { return a /= s; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (const auto& t : Layout::get().mul) r.c[t.k] += a.c[t.i] * b.c[t.j];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }
  friend Jet operator/(S s, const Jet& b) { return inverse(b) * s; }

  friend Jet inverse(const Jet& u) {
    S u0 = u.c[0];
    std::vector<S> k(D + 1);
    S p = S(1) / u0;
    for (int i = 0; i <= D; ++i) {
      k[i] = p;
      p *= -S(1) / u0;
    }
    return compose(k, u);
  }

  // Horner evaluation of sum_k coeffs[k] (u - u0)^k
  friend Jet compose(const std::vector<S>& coeffs, const Jet& u) {
    Jet d = u;
    d.c[0] = S(0);
    Jet r(coeffs[D]);
    for (int k = D - 1; k >= 0; --k) {
      r = r * d;
      r.c[0] += coeffs[k];
    }
    return r;
  }
};

// ---- derivative-structure helpers ------------------------------------------

// ∂/∂x_v; the top-degree coefficients become unknown and are zeroed
template <class S, int NV, int D>
Jet<S, NV, D> diff(const Jet<S, NV, D>& a, int v) {
  const auto& L = Jet<S, NV, D>::Layout::get();
  Jet<S, NV, D> r;
  for (int i = 0; i < r.N; ++i) {
    int j = L.shift[v][i];
    if (j < 0) continue;
    r.c[i] = a.c[j] * double(L.exps[i][v] + 1);
  }
  return r;
}

// multiply by the displacement variable (x_v - x0_v)
template <class S, int NV, int D>
Jet<S, NV, D> mul_var(const Jet<S, NV, D>& a, int v) {
  const auto& L = Jet<S, NV, D>::Layout::get();
  Jet<S, NV, D> r;
  for (int i = 0; i < r.N; ++i) {
    int j = L.shift[v][i];
    if (j >= 0) r.c[j] = a.c[i];
  }
  return r;
}

// Jet of degree D from the value and the three degree-(D-1) jets of its gradient.
template <class S, int D>
Jet<S, 3, D> from_gradient(S value, const std::array<Jet<S, 3, D - 1>, 3>& g) {
  using J = Jet<S, 3, D>;
  const auto& L = J::Layout::get();
  J r(value);
  for (int i = 1; i < J::N; ++i) {
    const auto& e = L.exps[i];
    int v = 0;
    while (e[v] == 0) ++v;
    auto em = e;
    --em[v];
    r.c[i] = g[v].coef(em) / double(e[v]);
  }
  return r;
}

// ---- univariate truncated series used to build elementary-function coefficients

namespace series {

template <class S>
std::vector<S> mul(const std::vector<S>& a, const std::vector<S>& b) {
  size_t n = a.size();
  std::vector<S> r(n, S(0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; i + j < n; ++j) r[i + j] += a[i] * b[j];
  return r;
}

template <class S>
std::vector<S> inv(const std::vector<S>& a) {
  size_t n = a.size();
  std::vector<S> r(n, S(0));
  r[0] = S(1) / a[0];
  for (size_t k = 1; k < n; ++k) {
    S s(0);
    for (size_t j = 1; j <= k; ++j) s += a[j] * r[k - j];
    r[k] = -s / a[0];
  }
  return r;
}

template <class S>
std::vector<S> exp(const std::vector<S>& a) {
  size_t n = a.size();
  std::vector<S> r(n, S(0));
  r[0] = std::exp(a[0]);
  for (size_t k = 1; k < n; ++k) {
    S s(0);
    for (size_t j = 1; j <= k; ++j) s += double(j) * a[j] * r[k - j];
    r[k] = s / double(k);
  }
  return r;
}

// a^p for a[0] != 0
template <class S>
std::vector<S> pow(const std::vector<S>& a, double p) {
  size_t n = a.size();
  std::vector<S> r(n, S(0));
  r[0] = std::pow(a[0], p);
  for (size_t k = 1; k < n; ++k) {
    S s(0);
    for (size_t j = 1; j <= k; ++j) s += ((p + 1) * double(j) - double(k)) * a[j] * r[k - j];
    r[k] = s / (double(k) * a[0]);
  }
  return r;
}

// antiderivative with constant c0
template <class S>
std::vector<S> integral(const std::vector<S>& a, S c0) {
  size_t n = a.size();
  std::vector<S> r(n, S(0));
  r[0] = c0;
  for (size_t k = 1; k < n; ++k) r[k] = a[k - 1] / double(k);
  return r;
}

// series of (u0 + t)
template <class S>
std::vector<S> shifted_var(S u0, size_t n) {
  std::vector<S> r(n, S(0));
  r[0] = u0;
  if (n > 1) r[1] = S(1);
  return r;
}

}  // namespace series

// ---- elementary functions --------------------------------------------------

template <class S, int NV, int D>
Jet<S, NV, D> exp(const Jet<S, NV, D>& u) {
  std::vector<S> k(D + 1);
  S e = std::exp(u.c[0]);
  double f = 1;
  for (int i = 0; i <= D; ++i) {
    if (i > 0) f *= i;
    k[i] = e / f;
  }
  return compose(k, u);
}

template <class S, int NV, int D>
Jet<S, NV, D> log(const Jet<S, NV, D>& u) {
  std::vector<S> k(D + 1);
  S u0 = u.c[0];
  k[0] = std::log(u0);
  S p = S(1);
  for (int i = 1; i <= D; ++i) {
    p /= u0;
    k[i] = (i % 2 ? S(1) : S(-1)) * p / double(i);
  }
  return compose(k, u);
}

template <class S, int NV, int D>
Jet<S, NV, D> pow(const Jet<S, NV, D>& u, double p) {
  auto k = series::pow(series::shifted_var(u.c[0], D + 1), p);
  return compose(k, u);
}

template <class S, int NV, int D>
Jet<S, NV, D> sqrt(const Jet<S, NV, D>& u) {
  return pow(u, 0.5);
}

template <int NV, int D>
Jet<double, NV, D> atan(const Jet<double, NV, D>& u) {
  double u0 = u.c[0];
  std::vector<double> den = {1 + u0 * u0, 2 * u0, 1};
  den.resize(D + 1, 0.0);
  auto k = series::integral(series::inv(den), std::atan(u0));
  return compose(k, u);
}

template <int NV, int D>
Jet<double, NV, D> asinh(const Jet<double, NV, D>& u) {
  double u0 = u.c[0];
  std::vector<double> s = {1 + u0 * u0, 2 * u0, 1};
  s.resize(D + 1, 0.0);
  auto k = series::integral(series::pow(s, -0.5), std::asinh(u0));
  return compose(k, u);
}

template <int NV, int D>
Jet<double, NV, D> erf(const Jet<double, NV, D>& u) {
  double u0 = u.c[0];
  std::vector<double> s = {-u0 * u0, -2 * u0, -1};
  s.resize(D + 1, 0.0);
  auto e = series::exp(s);
  for (auto& v : e) v *= 2.0 / std::sqrt(M_PI);
  auto k = series::integral(e, std::erf(u0));
  return compose(k, u);
}

template <int NV, int D>
Jet<double, NV, D> erfc(const Jet<double, NV, D>& u) {
  auto r = -erf(u);
  r.c[0] = std::erfc(u.c[0]);
  return r;
}

// |u| with the branch picked from the expansion point; u0 = 0 takes the + side
template <int NV, int D>
Jet<double, NV, D> abs(const Jet<double, NV, D>& u) {
  return u.c[0] < 0 ? -u : u;
}

// Angle θ in (-π, π] with tan θ = n / d (atan2), smooth away from the origin.
template <int NV, int D>
Jet<double, NV, D> atan2(const Jet<double, NV, D>& n, const Jet<double, NV, D>& d) {
  double n0 = n.c[0], d0 = d.c[0];
  Jet<double, NV, D> r;
  if (std::abs(d0) >= std::abs(n0)) {
    r = atan(n / d);
    if (d0 < 0) r.c[0] += (n0 >= 0 ? M_PI : -M_PI);
  } else {
    r = -atan(d / n);
    r.c[0] += (n0 > 0 ? M_PI / 2 : -M_PI / 2);
  }
  r.c[0] = std::atan2(n0, d0);
  return r;
}

// scalar counterparts so generic code can call abs/atan2 uniformly
inline double abs(double x) { return std::abs(x); }
inline double atan2(double n, double d) { return std::atan2(n, d); }

template <class T>
struct scalar_of {
  using type = T;
};
template <class S, int NV, int D>
struct scalar_of<Jet<S, NV, D>> {
  using type = S;
};

inline double value_of(double x) { return x; }
inline std::complex<double> value_of(std::complex<double> x) { return x; }
template <class S, int NV, int D>
S value_of(const Jet<S, NV, D>& j) {
  return j.c[0];
}

using Jet3d = Jet<double, 3, 3>;
using Jet4d = Jet<double, 3, 4>;

}  // namespace eshelby

#include "eshelby/oracle.hpp"

#include <fftw3.h>

#include <cmath>

#include "eshelby/specfun.hpp"

namespace eshelby {

void OracleTol::validate() const {
  if (!(rel >= 0 && abs >= 0) || (rel == 0 && abs == 0)) throw PreconditionError("OracleTol: bad tolerances");
  if (max_depth < 0 || max_depth > 20) throw PreconditionError("OracleTol: max_depth out of range");
}

namespace {

// ∫_0^1 s² f(x + s d) ds
double ray(const Vec3& x, const Vec3& d, const std::function<double(const Vec3&)>& f, double rel) {
  QuadratureSpec q;
  q.rel_tol = rel;
  q.abs_tol = 1e-300;
  q.max_subdivisions = 400;
  double err = 0;
  try {
    return integrate([&](double s) { return s * s * f(x + s * d); }, 0.0, 1.0, q, &err);
  } catch (const AccuracyError&) {
    // an unresolvable ray contributes its best estimate; the outer level decides
    q.rel_tol = std::max(rel * 100, 1e-8);
    return integrate([&](double s) { return s * s * f(x + s * d); }, 0.0, 1.0, q, &err);
  }
}

// 7-point degree-5 rule on a triangle, embedded in an adaptive 1-to-4 split
struct TriIntegrator {
  const Vec3& x;
  const std::function<double(const Vec3&)>& f;
  double h;  // (y - x)·n on this face
  double inner_rel;
  int max_depth;

  double rule(const Vec3& v0, const Vec3& v1, const Vec3& v2) const {
    double area = 0.5 * (v1 - v0).cross(v2 - v0).norm();
    static const double r15 = std::sqrt(15.0);
    static const double a1 = (6 - r15) / 21, a2 = (6 + r15) / 21;
    static const double w0 = 9.0 / 40, w1 = (155 - r15) / 1200, w2 = (155 + r15) / 1200;
    auto g = [&](double l0, double l1, double l2) { return ray(x, l0 * v0 + l1 * v1 + l2 * v2 - x, f, inner_rel); };
    double s = w0 * g(1.0 / 3, 1.0 / 3, 1.0 / 3);
    s += w1 * (g(1 - 2 * a1, a1, a1) + g(a1, 1 - 2 * a1, a1) + g(a1, a1, 1 - 2 * a1));
    s += w2 * (g(1 - 2 * a2, a2, a2) + g(a2, 1 - 2 * a2, a2) + g(a2, a2, 1 - 2 * a2));
    return s * area * h;
  }

  double adapt(const Vec3& v0, const Vec3& v1, const Vec3& v2, double whole, double tol, int depth) const {
    Vec3 m01 = 0.5 * (v0 + v1), m12 = 0.5 * (v1 + v2), m20 = 0.5 * (v2 + v0);
    double c[4] = {rule(v0, m01, m20), rule(m01, v1, m12), rule(m20, m12, v2), rule(m01, m12, m20)};
    double sum = c[0] + c[1] + c[2] + c[3];
    if (std::abs(sum - whole) <= tol) return sum;
    if (depth >= max_depth) throw AccuracyError("quad_region: triangle subdivision limit", std::abs(sum - whole));
    double t4 = tol / 2;
    return adapt(v0, m01, m20, c[0], t4, depth + 1) + adapt(m01, v1, m12, c[1], t4, depth + 1) +
           adapt(m20, m12, v2, c[2], t4, depth + 1) + adapt(m01, m12, m20, c[3], t4, depth + 1);
  }
};

double quad_poly(const Polyhedron& P, const Vec3& x, const std::function<double(const Vec3&)>& f,
                 const OracleTol& tol) {
  struct Tri {
    Vec3 v0, v1, v2;
    double h;
  };
  std::vector<Tri> tris;
  const auto& V = P.vertices();
  for (size_t fi = 0; fi < P.num_faces(); ++fi) {
    const auto& loop = P.faces()[fi];
    double h = (V[loop[0]] - x).dot(P.normal(fi));
    if (std::abs(h) < 1e-300) continue;
    for (size_t k = 1; k + 1 < loop.size(); ++k) tris.push_back({V[loop[0]], V[loop[k]], V[loop[k + 1]], h});
  }
  double inner = std::min(1e-10, tol.rel * 1e-2);
  // coarse pass to set the absolute target
  std::vector<double> coarse(tris.size());
  double total = 0, total_abs = 0;
  for (size_t i = 0; i < tris.size(); ++i) {
    TriIntegrator ti{x, f, tris[i].h, inner, tol.max_depth};
    coarse[i] = ti.rule(tris[i].v0, tris[i].v1, tris[i].v2);
    total += coarse[i];
    total_abs += std::abs(coarse[i]);
  }
  double target = std::max(tol.abs, tol.rel * std::abs(total));
  double sum = 0;
  for (size_t i = 0; i < tris.size(); ++i) {
    TriIntegrator ti{x, f, tris[i].h, inner, tol.max_depth};
    double share = total_abs > 0 ? std::abs(coarse[i]) / total_abs : 1.0 / tris.size();
    share = std::max(share, 0.1 / tris.size());
    sum += ti.adapt(tris[i].v0, tris[i].v1, tris[i].v2, coarse[i], target * share, 0);
  }
  return sum;
}

double quad_ellipsoid(const Ellipsoid& E, const Vec3& x, const std::function<double(const Vec3&)>& f,
                      const OracleTol& tol) {
  const double det = E.a1 * E.a2 * E.a3;
  const double inner = std::min(1e-10, tol.rel * 1e-2);
  QuadratureSpec qm, qp;
  qm.rel_tol = tol.rel;
  qm.abs_tol = tol.abs;
  qp.rel_tol = tol.rel * 0.1;
  qp.abs_tol = tol.abs * 0.1;
  auto mu_fn = [&](double mu) {
    double st = std::sqrt(std::max(0.0, 1 - mu * mu));
    auto phi_fn = [&](double ph) {
      Vec3 e(st * std::cos(ph), st * std::sin(ph), mu);
      Vec3 y(E.a1 * e.x(), E.a2 * e.y(), E.a3 * e.z());
      double w = det * (1 - (x.x() * e.x() / E.a1 + x.y() * e.y() / E.a2 + x.z() * e.z() / E.a3));
      return w * ray(x, y - x, f, inner);
    };
    return integrate(phi_fn, 0, 2 * M_PI, qp);
  };
  return integrate(mu_fn, -1, 1, qm);
}

}  // namespace

double quad_region(const Region& region, const Vec3& x, const std::function<double(const Vec3&)>& f,
                   const OracleTol& tol) {
  tol.validate();
  if (auto* P = std::get_if<Polyhedron>(&region)) {
    if (P->num_faces() == 0) return 0;
    return quad_poly(*P, x, f, tol);
  }
  const auto& E = std::get<Ellipsoid>(region);
  E.validate();
  return quad_ellipsoid(E, x, f, tol);
}

double quad_ball_radial(double a, double r, const std::function<double(double)>& F, const OracleTol& tol) {
  if (!(a > 0) || !(r >= 0)) throw PreconditionError("quad_ball_radial: need a > 0, r >= 0");
  tol.validate();
  QuadratureSpec q;
  q.rel_tol = tol.rel;
  q.abs_tol = tol.abs;
  double s = 0;
  double inner = std::max(0.0, a - r);
  // full shells while the sphere of radius ρ about x stays inside the ball
  if (r < a) s += integrate([&](double rho) { return 4 * M_PI * rho * rho * F(rho); }, 0, inner, q);
  // partial shells: cap area π ρ (a² - (r - ρ)²) / r
  if (r > 0)
    s += integrate([&](double rho) { return M_PI * rho * (a * a - (r - rho) * (r - rho)) / r * F(rho); },
                   std::abs(a - r), a + r, q);
  return s;
}

double quad_ball_radial_dr(double a, double r, const std::function<double(double)>& F, const OracleTol& tol) {
  if (!(a > 0) || !(r >= 0)) throw PreconditionError("quad_ball_radial_dr: need a > 0, r >= 0");
  tol.validate();
  if (r == 0) return 0;
  QuadratureSpec q;
  q.rel_tol = tol.rel;
  q.abs_tol = tol.abs;
  // the moving limits contribute nothing: the cap area matches 4πρ² at ρ = |a - r| and vanishes at a + r
  return integrate(
      [&](double rho) {
        double d = r - rho;
        return M_PI * rho * (d * d - 2 * r * d - a * a) / (r * r) * F(rho);
      },
      std::abs(a - r), a + r, q);
}

namespace {

double green_w(const Vec3& x, const Vec3& y, double tau, const Material& mat, const Moment& m) {
  Vec3 d = x - y;
  double r2 = d.squaredNorm();
  double g = std::exp(-r2 / (4 * mat.alpha * tau)) * std::pow(4 * M_PI * mat.alpha * tau, -1.5) / mat.Cp;
  if (m.p >= 0) g *= y[m.p];
  if (m.q >= 0) g *= y[m.q];
  if (m.grad >= 0) g *= -d[m.grad] / (2 * mat.alpha * tau);
  return g;
}

bool is_ball(const Region& region, double& a) {
  if (auto* E = std::get_if<Ellipsoid>(&region)) {
    if (E->a1 == E->a2 && E->a2 == E->a3) {
      a = E->a1;
      return true;
    }
  }
  return false;
}

}  // namespace

double quad_spatial(const Region& region, const Vec3& x, double tau, const Material& mat, const OracleTol& tol,
                    Moment m) {
  if (tau <= 0) return 0;
  double a = 0;
  if (m.radial() && is_ball(region, a)) {
    return quad_ball_radial(
        a, x.norm(),
        [&](double rho) {
          return std::exp(-rho * rho / (4 * mat.alpha * tau)) * std::pow(4 * M_PI * mat.alpha * tau, -1.5) / mat.Cp;
        },
        tol);
  }
  return quad_region(region, x, [&](const Vec3& y) { return green_w(x, y, tau, mat, m); }, tol);
}

double quad_time(const Region& region, const Vec3& x, double t, double t_prev, double t_f, int n,
                 const Material& mat, const OracleTol& tol, Moment m) {
  if (!(t_prev < t_f)) throw IntervalError("quad_time: need t_prev < t_f");
  if (n < 0 || n > 2) throw UnsupportedOrder("quad_time: n must be 0, 1 or 2");
  if (t <= t_prev) return 0;
  double tau1 = t - std::min(t, t_f), tau2 = t - t_prev;
  OracleTol inner = tol;
  inner.rel = tol.rel * 0.1;
  QuadratureSpec q;
  q.rel_tol = tol.rel;
  q.abs_tol = tol.abs;
  auto at = [&](double tau) { return std::pow(2 * mat.alpha * tau, n) * quad_spatial(region, x, tau, mat, inner, m); };
  // τ = s² removes the t' -> t endpoint behaviour
  return integrate([&](double s) { return 2 * s * at(s * s); }, std::sqrt(tau1), std::sqrt(tau2), q);
}

std::complex<double> quad_helmholtz(const Region& region, const Vec3& x, std::complex<double> beta, int n,
                                    const OracleTol& tol, Moment m) {
  if (n < 0 || n > 2) throw UnsupportedOrder("quad_helmholtz: n must be 0, 1 or 2");
  const std::complex<double> I(0, 1);
  auto val = [&](const Vec3& y) {
    Vec3 d = x - y;
    double r = d.norm();
    std::complex<double> v;
    if (m.grad >= 0) {
      // ∂/∂x_i [e^{iβr} r^{n-1}] = (iβ + (n-1)/r) e^{iβr} r^{n-1} d_i / r
      v = (I * beta + double(n - 1) / r) * std::exp(I * beta * r) * std::pow(r, n - 1) * d[m.grad] / r;
    } else {
      v = std::exp(I * beta * r) * std::pow(r, n - 1);
    }
    if (m.p >= 0) v *= y[m.p];
    if (m.q >= 0) v *= y[m.q];
    return v;
  };
  double a = 0;
  if (m.radial() && is_ball(region, a)) {
    auto F = [&](double rho, bool im) {
      auto v = std::exp(I * beta * rho) * std::pow(rho, n - 1);
      return im ? v.imag() : v.real();
    };
    double re = quad_ball_radial(a, x.norm(), [&](double rho) { return F(rho, false); }, tol);
    double imv = quad_ball_radial(a, x.norm(), [&](double rho) { return F(rho, true); }, tol);
    return {re, imv};
  }
  double re = quad_region(region, x, [&](const Vec3& y) { return val(y).real(); }, tol);
  double imv = quad_region(region, x, [&](const Vec3& y) { return val(y).imag(); }, tol);
  return {re, imv};
}

// ---- Fourier grid ----

void GridSpec::validate() const {
  if (n < 8 || (n & (n - 1)) != 0) throw PreconditionError("GridSpec: n must be a power of two >= 8");
  if (!(extent > 0)) throw PreconditionError("GridSpec: extent must be positive");
  if (std::abs(plane_x1) >= extent / 2) throw PreconditionError("GridSpec: plane outside the box");
}

PlaneMaps fft_cuboid_maps(double l, double t, std::optional<LagWindow> window, const Material& mat,
                          const GridSpec& g) {
  g.validate();
  mat.validate();
  if (!(l > 0)) throw PreconditionError("fft_cuboid_maps: l must be positive");
  if (g.extent < 4 * l) throw PreconditionError("fft_cuboid_maps: extent must be at least 4 l");
  if (window && (window->tau1 < 0 || !(window->tau2 > window->tau1)))
    throw IntervalError("fft_cuboid_maps: need 0 <= tau1 < tau2");
  if (!window && !(t > 0)) throw PreconditionError("fft_cuboid_maps: t must be positive");
  const int N = g.n;
  const double E = g.extent, h = E / N, al = mat.alpha;
  std::vector<double> k(N), theta(N);
  std::vector<int> mi(N);
  for (int j = 0; j < N; ++j) {
    int m = j < N / 2 ? j : j - N;  // FFT ordering
    mi[j] = m;
    k[j] = 2 * M_PI * m / E;
    theta[j] = m == 0 ? l : 2 * std::sin(k[j] * l / 2) / k[j];
  }
  auto kernel = [&](double k2) {
    if (!window) return std::exp(-al * k2 * t) / mat.Cp;
    if (k2 == 0) return (window->tau2 - window->tau1) / mat.Cp;
    return (std::exp(-al * k2 * window->tau1) - std::exp(-al * k2 * window->tau2)) / (mat.K * k2);
  };
  // sum over k1 on the plane x1 = c, then a 2D inverse transform in (k2, k3)
  std::vector<std::complex<double>> c1(N);
  for (int j = 0; j < N; ++j) c1[j] = theta[j] * std::exp(std::complex<double>(0, k[j] * g.plane_x1));
  const int outer = int(0.45 * N);
  double e_out = 0, e_tot = 0;
  fftw_complex* buf[3];
  for (auto& b : buf) b = fftw_alloc_complex(size_t(N) * N);
  for (int i2 = 0; i2 < N; ++i2)
    for (int i3 = 0; i3 < N; ++i3) {
      double k23 = k[i2] * k[i2] + k[i3] * k[i3];
      std::complex<double> s = 0;
      for (int i1 = 0; i1 < N; ++i1) {
        std::complex<double> v = c1[i1] * kernel(k[i1] * k[i1] + k23);
        s += v;
        double w = std::norm(v * theta[i2] * theta[i3]);
        e_tot += w;
        if (std::abs(mi[i1]) > outer || std::abs(mi[i2]) > outer || std::abs(mi[i3]) > outer) e_out += w;
      }
      s *= theta[i2] * theta[i3] / (E * E * E);
      // x_j = -E/2 + j h gives the phase (-1)^{m2 + m3}
      if ((mi[i2] + mi[i3]) & 1) s = -s;
      size_t idx = size_t(i2) * N + i3;
      std::complex<double> d3 = std::complex<double>(0, k[i3]) * s;
      std::complex<double> d33 = -k[i3] * k[i3] * s;
      buf[0][idx][0] = s.real();
      buf[0][idx][1] = s.imag();
      buf[1][idx][0] = d3.real();
      buf[1][idx][1] = d3.imag();
      buf[2][idx][0] = d33.real();
      buf[2][idx][1] = d33.imag();
    }
  if (e_out > 1e-6 * e_tot) {
    for (auto& b : buf) fftw_free(b);
    throw ResolutionError("fft_cuboid_maps: spectrum not resolved (outer-band energy fraction " +
                          std::to_string(e_out / e_tot) + ")");
  }
  PlaneMaps out;
  out.n = N;
  out.extent = E;
  out.coord.resize(N);
  for (int j = 0; j < N; ++j) out.coord[j] = -E / 2 + j * h;
  std::vector<double>* dst[3] = {&out.F, &out.F3, &out.F33};
  for (int c = 0; c < 3; ++c) {
    fftw_plan p = fftw_plan_dft_2d(N, N, buf[c], buf[c], FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
    dst[c]->resize(size_t(N) * N);
    for (size_t i = 0; i < size_t(N) * N; ++i) (*dst[c])[i] = buf[c][i][0];
    fftw_free(buf[c]);
  }
  return out;
}

// ---- jumps, finite differences ----

JumpResult jump_measure(const std::function<double(const Vec3&)>& sampler, const Vec3& x0, const Vec3& normal,
                        double h) {
  if (!(h > 0)) throw PreconditionError("jump_measure: offset must be positive");
  Vec3 n = normal.normalized();
  JumpResult r;
  double hs[3] = {4 * h, 2 * h, h};
  for (int i = 0; i < 3; ++i) r.diffs[i] = sampler(x0 + hs[i] * n) - sampler(x0 - hs[i] * n);
  // d(h) = J + c1 h + c2 h² + ...
  double r1a = 2 * r.diffs[1] - r.diffs[0];
  double r1b = 2 * r.diffs[2] - r.diffs[1];
  r.jump = (4 * r1b - r1a) / 3;
  double s1 = r.diffs[1] - r.diffs[0], s2 = r.diffs[2] - r.diffs[1];
  r.reliable = (s1 * s2 >= 0) && std::abs(s2) <= std::abs(s1) + 1e-15 * std::abs(r.jump);
  return r;
}

Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x, double h) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    g[i] = (f(x + e) - f(x - e)) / (2 * h);
  }
  return g;
}

double fd_second(const std::function<double(const Vec3&)>& f, const Vec3& x, int i, int j, double h) {
  Vec3 ei = Vec3::Zero(), ej = Vec3::Zero();
  ei[i] = h;
  ej[j] = h;
  if (i == j) return (f(x + ei) - 2 * f(x) + f(x - ei)) / (h * h);
  return (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h);
}

}  // namespace eshelby

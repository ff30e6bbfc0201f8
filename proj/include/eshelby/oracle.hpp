#pragma once

// Brute-force reference evaluators. None of these share code paths with the
// series kernels beyond the Polyhedron container.

#include <complex>
#include <functional>
#include <optional>
#include <variant>

#include "eshelby/sphere.hpp"
#include "eshelby/transient.hpp"

namespace eshelby {

using Region = std::variant<Polyhedron, Ellipsoid>;

struct OracleTol {
  double rel = 1e-8;
  double abs = 1e-15;
  int max_depth = 12;  // triangle subdivision levels
  void validate() const;
};

// ∫_region f(y) dy. The region is swept by rays from x:
// ∫_Ω f = ∮ ((y - x)·n) ∫_0^1 s² f(x + s(y - x)) ds dA(y),
// which keeps a 1/|x - y| singularity at x integrable without special cells.
double quad_region(const Region& region, const Vec3& x, const std::function<double(const Vec3&)>& f,
                   const OracleTol& tol = {});

// ∫_ball F(|y - x|) dy through the exact spherical-shell measure about x
double quad_ball_radial(double a, double r, const std::function<double(double)>& F, const OracleTol& tol = {});
// d/dr of the same integral, differentiating the cap measure under the integral
double quad_ball_radial_dr(double a, double r, const std::function<double(double)>& F, const OracleTol& tol = {});

// Optional weights of the Green's-function integrand: y_p, y_q factors and ∂/∂x_grad.
struct Moment {
  int p = -1;
  int q = -1;
  int grad = -1;
  bool radial() const { return p < 0 && q < 0 && grad < 0; }
};

// (1/Cp) ∫_Ω G(x - y, tau) w(y) dy
double quad_spatial(const Region& region, const Vec3& x, double tau, const Material& mat, const OracleTol& tol = {},
                    Moment m = {});

// ∫_{t_prev}^{min(t_f, t)} (2α(t - t'))^n (1/Cp) ∫_Ω G w dy dt', with t' = t - s² near t' = t
double quad_time(const Region& region, const Vec3& x, double t, double t_prev, double t_f, int n,
                 const Material& mat, const OracleTol& tol = {}, Moment m = {});

// ∫_Ω e^{iβr} r^{n-1} w(y) dy
std::complex<double> quad_helmholtz(const Region& region, const Vec3& x, std::complex<double> beta, int n,
                                    const OracleTol& tol = {}, Moment m = {});

// ---- Fourier-grid cuboid maps ----

struct GridSpec {
  int n = 256;            // samples per axis, power of two
  double extent = 4.0;    // periodic box edge (m)
  double plane_x1 = 0.0;  // maps live on the plane x1 = plane_x1
  void validate() const;
};

// Field F and its x3 derivatives on the (x2, x3) plane, row-major [i2 * n + i3].
struct PlaneMaps {
  int n = 0;
  double extent = 0;
  std::vector<double> coord;  // -extent/2 + j h
  std::vector<double> F, F3, F33;
  double at(const std::vector<double>& v, int i2, int i3) const { return v[size_t(i2) * n + i3]; }
};

// Cube of edge l centred at the origin. Without a window the kernel is the spatial
// e^{-αk²t}/Cp; with a window it is the time-integrated C^0 kernel.
PlaneMaps fft_cuboid_maps(double l, double t, std::optional<LagWindow> window, const Material& mat,
                          const GridSpec& grid = {});

// ---- jumps and finite differences ----

struct JumpResult {
  double jump = 0;
  bool reliable = true;  // false when the two-sided differences are not monotone in h
  std::array<double, 3> diffs{};  // offsets 4h, 2h, h
};

// sampler(x0 + h n) - sampler(x0 - h n), Richardson-extrapolated over {4h, 2h, h}
JumpResult jump_measure(const std::function<double(const Vec3&)>& sampler, const Vec3& x0, const Vec3& normal,
                        double h);

Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x, double h);
double fd_second(const std::function<double(const Vec3&)>& f, const Vec3& x, int i, int j, double h);

}  // namespace eshelby

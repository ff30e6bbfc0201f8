#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "eshelby/eim.hpp"
#include "eshelby/harmonic.hpp"
#include "eshelby/oracle.hpp"
#include "eshelby/parallel.hpp"
#include "eshelby/sphere.hpp"

namespace cli {

using namespace eshelby;
using nlohmann::json;

namespace {

// Strict view of one JSON object: unknown keys are rejected up front.
class Config {
 public:
  Config(json j, std::string where, std::initializer_list<const char*> allowed) : j_(std::move(j)), where_(where) {
    if (j_.is_null()) j_ = json::object();
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
  }

  double num(const char* key, double def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
    return j_[key].get<double>();
  }
  int integer(const char* key, int def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number_integer()) throw ConfigError(where_ + "." + key + ": expected an integer");
    return j_[key].get<int>();
  }
  std::vector<double> nums(const char* key, std::vector<double> def) const {
    if (!j_.contains(key)) return def;
    std::vector<double> v;
    if (!j_[key].is_array()) throw ConfigError(where_ + "." + key + ": expected an array");
    for (const auto& e : j_[key]) {
      if (!e.is_number()) throw ConfigError(where_ + "." + key + ": expected numbers");
      v.push_back(e.get<double>());
    }
    return v;
  }
  std::vector<int> ints(const char* key, std::vector<int> def) const {
    if (!j_.contains(key)) return def;
    std::vector<int> v;
    if (!j_[key].is_array()) throw ConfigError(where_ + "." + key + ": expected an array");
    for (const auto& e : j_[key]) {
      if (!e.is_number_integer()) throw ConfigError(where_ + "." + key + ": expected integers");
      v.push_back(e.get<int>());
    }
    return v;
  }
  Config sub(const char* key, std::initializer_list<const char*> allowed) const {
    return Config(j_.contains(key) ? j_[key] : json::object(), where_ + "." + key, allowed);
  }

 private:
  json j_;
  std::string where_;
};

json load_config(const RunOptions& opt, std::string& hash) {
  std::string text = opt.config.empty() ? std::string("{}") : read_file(opt.config);
  hash = git_blob_sha1(text);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

struct Gates {
  json j = json::object();
  bool ok = true;
  void add(const std::string& name, double value, double limit, bool pass, const char* relation) {
    j[name] = {{"value", value}, {"limit", limit}, {"relation", relation}, {"pass", pass}};
    if (!pass) {
      ok = false;
      std::fprintf(stderr, "gate %s failed: %.6g (%s %.6g)\n", name.c_str(), value, relation, limit);
    }
  }
};

json meta_base(const char* command, const std::string& hash, const RunOptions& opt) {
  json m;
  m["command"] = command;
  m["config_sha1"] = hash;
  m["config_path"] = opt.config.empty() ? "" : opt.config.filename().string();
  return m;
}

std::vector<double> line(double half, int samples) {
  if (samples < 2) throw ConfigError("samples must be >= 2");
  std::vector<double> v(samples);
  for (int i = 0; i < samples; ++i) v[i] = -half + 2 * half * i / (samples - 1);
  return v;
}

double rel(double a, double ref) { return std::abs(a - ref) / std::abs(ref); }

void check_levels(const std::vector<int>& levels) {
  if (levels.empty()) throw ConfigError("levels must not be empty");
  for (size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0 || levels[i] > 5) throw ConfigError("levels must lie in [0, 5]");
    if (i && levels[i] <= levels[i - 1]) throw ConfigError("levels must be increasing");
  }
}

}  // namespace

// ---- verify-helmholtz ----

int cmd_verify_helmholtz(const RunOptions& opt) {
  std::string hash;
  Config c(load_config(opt, hash), "config",
           {"radius", "beta", "levels", "samples", "span", "n_max", "gate", "newtonian_beta"});
  const double a = c.num("radius", 0.1);
  auto bv = c.nums("beta", {10, 10});
  if (bv.size() != 2) throw ConfigError("beta: expected [re, im]");
  const cplx beta(bv[0], bv[1]);
  auto levels = c.ints("levels", {1, 2, 3});
  check_levels(levels);
  const int samples = c.integer("samples", 101);
  const double span = c.num("span", 2.5);
  SeriesParams sp{opt.n_max.value_or(c.integer("n_max", 20))};
  sp.validate();
  const double gate = opt.gate.value_or(c.num("gate", 3.0)) / 100;
  const double nb = c.num("newtonian_beta", 1e-6);
  if (!(a > 0)) throw ConfigError("radius must be positive");
  HarmonicParams hp{beta, std::nullopt};

  auto xs = line(span * a, samples);
  const size_t n = xs.size(), nl = levels.size();
  // reference: exact ball, shell reduction
  std::vector<cplx> ref(n), dref(n);
  parallel_for(n, [&](size_t i) {
    double r = std::abs(xs[i]);
    auto F = [&](bool im) {
      return [=](double rho) {
        cplx v = std::exp(cplx(0, 1) * beta * rho) / rho;
        return im ? v.imag() : v.real();
      };
    };
    OracleTol tol{1e-10, 1e-16};
    ref[i] = {quad_ball_radial(a, r, F(false), tol), quad_ball_radial(a, r, F(true), tol)};
    double s = xs[i] < 0 ? -1 : 1;
    dref[i] = s * cplx(quad_ball_radial_dr(a, r, F(false), tol), quad_ball_radial_dr(a, r, F(true), tol));
  });
  double dscale = 0;
  for (auto v : dref) dscale = std::max(dscale, std::abs(v));

  std::vector<std::vector<cplx>> phi(nl, std::vector<cplx>(n)), dphi(nl, std::vector<cplx>(n));
  json meta = meta_base("verify-helmholtz", hash, opt);
  json lv = json::array();
  std::vector<double> err_phi(nl), err_dphi(nl);
  for (size_t L = 0; L < nl; ++L) {
    Polyhedron P = tessellate_sphere(a, levels[L]);
    parallel_for(n, [&](size_t i) {
      Vec3 x(0, 0, xs[i]);
      auto J = A_n_jet<1>(P, x, hp, 0, sp);
      phi[L][i] = J.value();
      dphi[L][i] = J.deriv({0, 0, 1});
    });
    double e1 = 0, e2 = 0;
    for (size_t i = 0; i < n; ++i) {
      e1 = std::max(e1, std::abs(phi[L][i] - ref[i]) / std::abs(ref[i]));
      e2 = std::max(e2, std::abs(dphi[L][i] - dref[i]) / dscale);
    }
    err_phi[L] = e1;
    err_dphi[L] = e2;
    lv.push_back({{"level", levels[L]}, {"faces", P.num_faces()}, {"max_rel_err_phi", e1}, {"max_err_dphi3", e2}});
  }
  auto table = [&](auto pick) {
    Table t;
    t.cols.push_back("x3");
    for (int L : levels) t.cols.push_back("level" + std::to_string(L));
    t.cols.push_back("reference");
    for (size_t i = 0; i < n; ++i) {
      std::vector<double> r{xs[i]};
      for (size_t L = 0; L < nl; ++L) r.push_back(pick(L, i, false));
      r.push_back(pick(0, i, true));
      t.rows.push_back(r);
    }
    return t;
  };
  write_csv(opt.out / "phi_re.csv", table([&](size_t L, size_t i, bool r) { return r ? ref[i].real() : phi[L][i].real(); }));
  write_csv(opt.out / "phi_im.csv", table([&](size_t L, size_t i, bool r) { return r ? ref[i].imag() : phi[L][i].imag(); }));
  write_csv(opt.out / "dphi3_re.csv",
            table([&](size_t L, size_t i, bool r) { return r ? dref[i].real() : dphi[L][i].real(); }));
  write_csv(opt.out / "dphi3_im.csv",
            table([&](size_t L, size_t i, bool r) { return r ? dref[i].imag() : dphi[L][i].imag(); }));

  // β -> 0 against the Newtonian potential 2π(a² - r²/3) at interior samples
  Polyhedron fine = tessellate_sphere(a, levels.back());
  double newton = 0;
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(xs[i]) >= a) continue;
    cplx v = A_n(fine, Vec3(0, 0, xs[i]), HarmonicParams{cplx(nb, nb), std::nullopt}, 0, sp);
    double exact = 2 * M_PI * (a * a - xs[i] * xs[i] / 3);
    newton = std::max(newton, std::abs(v.real() - exact) / exact);
  }

  Gates g;
  g.add("finest_phi", err_phi.back(), gate, err_phi.back() <= gate, "<=");
  g.add("finest_dphi3", err_dphi.back(), gate, err_dphi.back() <= gate, "<=");
  if (nl > 1) g.add("refinement_reduces_error", err_phi.front(), err_phi.back(), err_phi.front() > err_phi.back(), ">");
  meta["parameters"] = {{"radius", a}, {"beta", {beta.real(), beta.imag()}}, {"n_max", sp.n_max},
                        {"samples", samples}, {"span", span}};
  meta["levels"] = lv;
  meta["newtonian_limit_max_rel_err"] = newton;
  meta["dphi3_error_norm"] = "max |series - reference| / max |reference| along the line";
  meta["gates"] = g.j;
  meta["pass"] = g.ok;
  write_json(opt.out / "verify-helmholtz.json", meta);
  return g.ok ? 0 : 1;
}

// ---- verify-sphere ----

int cmd_verify_sphere(const RunOptions& opt) {
  std::string hash;
  Config c(load_config(opt, hash), "config",
           {"radius", "K", "Cp", "times", "levels", "samples", "span", "n_max", "gate", "sweep"});
  const double a = c.num("radius", 0.1);
  const Material mat = Material::make(c.num("K", 0.05), c.num("Cp", 1.0));
  auto times = c.nums("times", {2, 5});
  auto levels = c.ints("levels", {1, 2, 3});
  check_levels(levels);
  const int samples = c.integer("samples", 101);
  const double span = c.num("span", 2.5);
  SeriesParams sp{opt.n_max.value_or(c.integer("n_max", 10))};
  sp.validate();
  const double gate = opt.gate.value_or(c.num("gate", 2.0)) / 100;
  Config sw = c.sub("sweep", {"n_max", "span", "samples", "level", "t", "tolerance"});
  auto sweep_n = sw.ints("n_max", {0, 1, 2, 3, 6, 10});
  const double sweep_span = sw.num("span", 10);
  const int sweep_samples = sw.integer("samples", 201);
  const int sweep_level = sw.integer("level", levels.back());
  const double sweep_t = sw.num("t", 2);
  const double sweep_tol = sw.num("tolerance", 0.01);
  if (!(a > 0)) throw ConfigError("radius must be positive");
  if (times.empty()) throw ConfigError("times must not be empty");
  for (double t : times)
    if (!(t > 0)) throw ConfigError("times must be positive");

  auto xs = line(span * a, samples);
  const size_t n = xs.size(), nl = levels.size();
  std::vector<Polyhedron> meshes;
  json meta = meta_base("verify-sphere", hash, opt);
  json lv = json::array();
  for (int L : levels) {
    meshes.push_back(tessellate_sphere(a, L));
    lv.push_back({{"level", L}, {"faces", meshes.back().num_faces()}});
  }
  json errs = json::object();
  std::vector<double> coarse_err, fine_err;
  for (double t : times) {
    for (int kind = 0; kind < 2; ++kind) {  // 0 spatial L, 1 time C⁰ over [0, t] seen at t
      std::vector<std::vector<double>> val(nl, std::vector<double>(n));
      std::vector<double> ref(n);
      std::vector<int> flagged(n);
      for (size_t L = 0; L < nl; ++L)
        parallel_for(n, [&](size_t i) {
          Vec3 x(0, 0, xs[i]);
          Flags fl;
          val[L][i] = kind == 0 ? spatial_L(meshes[L], x, t, mat, sp, &fl) : C_nf(meshes[L], x, t, 0, t, 0, mat, sp, &fl);
          if (fl.series_unconverged) flagged[i] = 1;
        });
      for (size_t i = 0; i < n; ++i) {
        double r = std::abs(xs[i]);
        ref[i] = kind == 0 ? sphere_L(a, r, t, mat) : sphere_E(a, r, t, mat, 0) - sphere_E(a, r, 0, mat, 0);
      }
      Table tb;
      tb.cols.push_back("x3");
      for (int L : levels) tb.cols.push_back("level" + std::to_string(L));
      tb.cols.push_back("reference");
      json e = json::array();
      std::vector<double> emax(nl, 0);
      for (size_t i = 0; i < n; ++i) {
        std::vector<double> row{xs[i]};
        for (size_t L = 0; L < nl; ++L) {
          row.push_back(val[L][i]);
          emax[L] = std::max(emax[L], rel(val[L][i], ref[i]));
        }
        row.push_back(ref[i]);
        tb.rows.push_back(row);
      }
      std::string name = std::string(kind == 0 ? "spatial" : "time") + "_t" + tag(t);
      write_csv(opt.out / (name + ".csv"), tb);
      for (size_t L = 0; L < nl; ++L) e.push_back(emax[L]);
      errs[name] = e;
      if (kind == 0) {
        coarse_err.push_back(emax.front());
        fine_err.push_back(emax.back());
      }
    }
  }

  // n_max sweep on the time tensor, window [0, t] seen at t
  Polyhedron sm = tessellate_sphere(a, sweep_level);
  auto xw = line(sweep_span * a, sweep_samples);
  std::vector<std::vector<double>> sv(sweep_n.size(), std::vector<double>(xw.size()));
  for (size_t k = 0; k < sweep_n.size(); ++k) {
    SeriesParams s2{sweep_n[k]};
    s2.validate();
    parallel_for(xw.size(), [&](size_t i) { sv[k][i] = C_nf(sm, Vec3(0, 0, xw[i]), sweep_t, 0, sweep_t, 0, mat, s2); });
  }
  Table st;
  st.cols.push_back("x3");
  for (int nm : sweep_n) st.cols.push_back("nmax" + std::to_string(nm));
  st.cols.push_back("reference");
  std::vector<double> breakdown(sweep_n.size(), INFINITY);
  for (size_t i = 0; i < xw.size(); ++i) {
    double r = std::abs(xw[i]);
    double ref = sphere_E(a, r, sweep_t, mat, 0) - sphere_E(a, r, 0, mat, 0);
    std::vector<double> row{xw[i]};
    for (size_t k = 0; k < sweep_n.size(); ++k) {
      row.push_back(sv[k][i]);
      if (rel(sv[k][i], ref) > sweep_tol) breakdown[k] = std::min(breakdown[k], r);
    }
    row.push_back(ref);
    st.rows.push_back(row);
  }
  write_csv(opt.out / "nmax_sweep.csv", st);
  json bd = json::object();
  bool ordered = true;
  for (size_t k = 0; k < sweep_n.size(); ++k) {
    bd[std::to_string(sweep_n[k])] = std::isfinite(breakdown[k]) ? json(breakdown[k] / a) : json("none");
    if (k && sweep_n[k] > sweep_n[k - 1] && breakdown[k] < breakdown[k - 1]) ordered = false;
  }

  Gates g;
  g.add("finest_spatial_t" + tag(times.front()), fine_err.front(), gate, fine_err.front() <= gate, "<=");
  if (times.size() > 1 && nl > 1)
    g.add("coarse_error_grows_with_time", coarse_err.back(), coarse_err.front(),
          coarse_err.back() > coarse_err.front(), ">");
  g.add("breakdown_radius_ordering", ordered ? 1 : 0, 1, ordered, "==");
  meta["parameters"] = {{"radius", a}, {"K", mat.K}, {"Cp", mat.Cp}, {"alpha", mat.alpha}, {"n_max", sp.n_max},
                        {"times", times}, {"samples", samples}, {"span", span}};
  meta["levels"] = lv;
  meta["max_rel_err"] = errs;
  meta["sweep"] = {{"t", sweep_t}, {"level", sweep_level}, {"faces", sm.num_faces()}, {"tolerance", sweep_tol},
                   {"breakdown_radius_over_a", bd}};
  meta["gates"] = g.j;
  meta["pass"] = g.ok;
  write_json(opt.out / "verify-sphere.json", meta);
  return g.ok ? 0 : 1;
}

// ---- cuboid-maps ----

int cmd_cuboid_maps(const RunOptions& opt) {
  std::string hash;
  Config c(load_config(opt, hash), "config",
           {"edge", "K", "Cp", "t", "grid", "half_width", "n_max", "gate", "growth_times", "jump", "beta"});
  const double l = c.num("edge", 0.2);
  const Material mat = Material::make(c.num("K", 0.05), c.num("Cp", 1.0));
  const double t = c.num("t", 2);
  Config gc = c.sub("grid", {"n", "extent", "plane_x1"});
  GridSpec grid;
  grid.n = gc.integer("n", 256);
  grid.extent = gc.num("extent", 4.0);
  grid.plane_x1 = gc.num("plane_x1", 0.0);
  const double half = c.num("half_width", 0.5);
  SeriesParams sp{opt.n_max.value_or(c.integer("n_max", 10))};
  sp.validate();
  const double gate = opt.gate.value_or(c.num("gate", 2.0)) / 100;
  auto growth = c.nums("growth_times", {0.5, 5});
  Config jc = c.sub("jump", {"point", "h"});
  auto jp = jc.nums("point", {0.03, 0.02, 0.1});
  const double jh = jc.num("h", 1e-3);
  auto bv = c.nums("beta", {10, 10});
  if (jp.size() != 3 || bv.size() != 2) throw ConfigError("jump.point needs 3 numbers, beta 2");
  if (!(l > 0 && t > 0 && half > 0)) throw ConfigError("edge, t and half_width must be positive");
  if (growth.size() != 2) throw ConfigError("growth_times: expected two times");
  try {
    grid.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  const Polyhedron cube = make_cuboid(l, l, l);
  const double h = grid.extent / grid.n;

  // plot-window indices of the Fourier grid
  std::vector<int> idx;
  for (int j = 0; j < grid.n; ++j) {
    double x = -grid.extent / 2 + j * h;
    if (std::abs(x) <= half + 1e-12) idx.push_back(j);
  }
  const size_t m = idx.size();
  auto coord = [&](int j) { return -grid.extent / 2 + j * h; };
  // ≥ 2 cells from every face of the cube on this plane
  auto compared = [&](double x2, double x3) {
    double x1 = grid.plane_x1;
    double e = l / 2, d = 2 * h;
    double q[3] = {std::abs(x1), std::abs(x2), std::abs(x3)};
    for (int k = 0; k < 3; ++k) {
      bool within_other = true;
      for (int o = 0; o < 3; ++o)
        if (o != k && q[o] > e + d) within_other = false;
      if (within_other && std::abs(q[k] - e) < d) return false;
    }
    return true;
  };

  json meta = meta_base("cuboid-maps", hash, opt);
  Gates g;

  for (int kind = 0; kind < 2; ++kind) {  // 0 spatial L at t; 1 time C⁰ over [0, t] seen at t
    std::vector<double> F(m * m), F3(m * m), F33(m * m);
    parallel_for(m * m, [&](size_t k) {
      Vec3 x(grid.plane_x1, coord(idx[k / m]), coord(idx[k % m]));
      Jet<double, 3, 2> J = kind == 0 ? spatial_L_jet<2>(cube, x, t, mat, sp) : C_jets<2>(cube, x, LagWindow{0, t}, mat, sp)[0];
      F[k] = J.value();
      F3[k] = J.deriv({0, 0, 1});
      F33[k] = J.deriv({0, 0, 2});
    });
    std::string base = kind == 0 ? "L" : "C0";
    Table ts;
    ts.cols = {"x2", "x3", base, base + "_3", base + "_33"};
    for (size_t k = 0; k < m * m; ++k)
      ts.rows.push_back({coord(idx[k / m]), coord(idx[k % m]), F[k], F3[k], F33[k]});
    write_csv(opt.out / (base + "_series.csv"), ts);

    // centro-symmetry of the series map
    double sym = 0, fmax = 0;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) {
        fmax = std::max(fmax, std::abs(F[i * m + j]));
        sym = std::max(sym, std::abs(F[i * m + j] - F[(m - 1 - i) * m + (m - 1 - j)]));
      }
    meta[base]["centro_symmetry"] = sym / fmax;

    try {
      auto P = fft_cuboid_maps(l, t, kind == 0 ? std::nullopt : std::optional<LagWindow>(LagWindow{0, t}), mat, grid);
      Table tf, td;
      tf.cols = ts.cols;
      td.cols = {"x2", "x3", "d" + base, "d" + base + "_3", "d" + base + "_33", "compared"};
      double err[3] = {0, 0, 0}, mx[3] = {0, 0, 0};
      for (size_t k = 0; k < m * m; ++k) {
        int i2 = idx[k / m], i3 = idx[k % m];
        double x2 = coord(i2), x3 = coord(i3);
        double f[3] = {P.at(P.F, i2, i3), P.at(P.F3, i2, i3), P.at(P.F33, i2, i3)};
        double s[3] = {F[k], F3[k], F33[k]};
        bool cmp = compared(x2, x3);
        tf.rows.push_back({x2, x3, f[0], f[1], f[2]});
        td.rows.push_back({x2, x3, s[0] - f[0], s[1] - f[1], s[2] - f[2], cmp ? 1.0 : 0.0});
        if (cmp)
          for (int q = 0; q < 3; ++q) {
            err[q] = std::max(err[q], std::abs(s[q] - f[q]));
            mx[q] = std::max(mx[q], std::abs(s[q]));
          }
      }
      write_csv(opt.out / (base + "_fft.csv"), tf);
      write_csv(opt.out / (base + "_diff.csv"), td);
      meta[base]["fft_vs_series_max_norm_rel"] = {err[0] / mx[0], err[1] / mx[1], err[2] / mx[2]};
    } catch (const ResolutionError& e) {
      meta[base]["fft"] = std::string("skipped: ") + e.what();
    }
  }

  // L̄ grows with time
  double gmax[2] = {0, 0};
  for (int k = 0; k < 2; ++k)
    for (size_t q = 0; q < m * m; q += 7) {
      Vec3 x(grid.plane_x1, coord(idx[q / m]), coord(idx[q % m]));
      gmax[k] = std::max(gmax[k], C_nf(cube, x, growth[k], 0, growth[k], 0, mat, sp));
    }
  meta["growth"] = {{"times", growth}, {"map_max", {gmax[0], gmax[1]}}};
  g.add("time_map_grows", gmax[1], gmax[0], gmax[1] > gmax[0], ">");

  // jumps across the top face
  Vec3 x0(jp[0], jp[1], jp[2]), nrm(0, 0, 1);
  auto js = jump_measure([&](const Vec3& x) { return spatial_L_jet<2>(cube, x, t, mat, sp).deriv({0, 0, 2}); }, x0,
                         nrm, jh);
  auto jt = jump_measure(
      [&](const Vec3& x) { return C_jets<2>(cube, x, LagWindow{0, t}, mat, sp)[0].deriv({0, 0, 2}); }, x0, nrm, jh);
  HarmonicParams hp{cplx(bv[0], bv[1]), std::nullopt};
  SeriesParams hs{std::max(sp.n_max, 20)};
  auto jhm = jump_measure(
      [&](const Vec3& x) { return (A_n_jet<2>(cube, x, hp, 0, hs).deriv({0, 0, 2}) / (4 * M_PI * mat.K)).real(); },
      x0, nrm, jh);
  const double invK = 1 / mat.K;
  meta["jumps"] = {{"point", jp},
                   {"h", jh},
                   {"spatial_L_33", js.jump},
                   {"time_C0_33", jt.jump},
                   {"harmonic_re_L_33", jhm.jump},
                   {"one_over_K", invK},
                   {"reliable", {js.reliable, jt.reliable, jhm.reliable}}};
  g.add("spatial_L_33_jump", std::abs(js.jump) / invK, 1e-3, std::abs(js.jump) <= 1e-3 * invK, "<=");
  g.add("time_C0_33_jump", std::abs(jt.jump) / invK, gate, std::abs(std::abs(jt.jump) - invK) <= gate * invK,
        "within gate of 1");
  g.add("harmonic_L_33_jump", std::abs(jhm.jump) / invK, gate, std::abs(std::abs(jhm.jump) - invK) <= gate * invK,
        "within gate of 1");
  meta["parameters"] = {{"edge", l},      {"K", mat.K},          {"Cp", mat.Cp},
                        {"t", t},         {"n_max", sp.n_max},   {"grid", {{"n", grid.n}, {"extent", grid.extent}, {"plane_x1", grid.plane_x1}}},
                        {"half_width", half}};
  meta["gates"] = g.j;
  meta["pass"] = g.ok;
  write_json(opt.out / "cuboid-maps.json", meta);
  return g.ok ? 0 : 1;
}

// ---- eim ----

int cmd_eim(const RunOptions& opt) {
  if (opt.config.empty()) throw ConfigError("eim needs --config");
  std::string text = read_file(opt.config);
  std::string hash = git_blob_sha1(text);
  InhomogeneityProblem base = parse_problem(text);
  const double gate = opt.gate.value_or(1.0) / 100;
  const ObservationLine& ob = base.observation;
  const double t_end = base.grid.t(base.grid.steps);
  for (double t : ob.times)
    if (!(t > 0 && t <= t_end * (1 + 1e-12))) throw ConfigError("observation time outside the solved history");

  json meta = meta_base("eim", hash, opt);
  Gates g;
  const EimOrder orders[3] = {EimOrder::Uniform, EimOrder::Linear, EimOrder::Quadratic};
  std::vector<std::vector<EigenCoeffs>> hist(3);
  for (int o = 0; o < 3; ++o) {
    InhomogeneityProblem pb = base;
    pb.order = orders[o];
    hist[o] = solve_history(pb);
    if (ob.samples >= 2) {
      std::vector<Vec3> pts(ob.samples);
      for (int i = 0; i < ob.samples; ++i) pts[i] = ob.start + (ob.end - ob.start) * (double(i) / (ob.samples - 1));
      Table dist;
      dist.cols = {"x1", "x2", "x3"};
      for (double t : ob.times) dist.cols.push_back("du_t" + tag(t));
      std::vector<std::vector<double>> du(ob.times.size(), std::vector<double>(pts.size()));
      for (size_t k = 0; k < ob.times.size(); ++k) {
        std::vector<FieldSample> fs(pts.size());
        parallel_for(pts.size(), [&](size_t i) { fs[i] = total_field(pb, hist[o], pts[i], ob.times[k]); });
        Table tb;
        tb.cols = {"x1", "x2", "x3", "u", "q1", "q2", "q3"};
        for (size_t i = 0; i < pts.size(); ++i) {
          tb.rows.push_back({pts[i][0], pts[i][1], pts[i][2], fs[i].u, fs[i].q[0], fs[i].q[1], fs[i].q[2]});
          du[k][i] = fs[i].u - fs[i].u_undisturbed;
        }
        write_csv(opt.out / (std::string("eim_") + order_name(orders[o]) + "_t" + tag(ob.times[k]) + ".csv"), tb);
      }
      for (size_t i = 0; i < pts.size(); ++i) {
        std::vector<double> row{pts[i][0], pts[i][1], pts[i][2]};
        for (size_t k = 0; k < ob.times.size(); ++k) row.push_back(du[k][i]);
        dist.rows.push_back(row);
      }
      write_csv(opt.out / (std::string("disturbance_") + order_name(orders[o]) + ".csv"), dist);
    }
  }
  bool mismatch = base.matrix.K != base.inclusion.K || base.matrix.Cp != base.inclusion.Cp;

  // order hierarchy of the interior residual and interface mismatch
  json res = json::object();
  for (double t : {1.0, 2.0}) {
    if (t > t_end) continue;
    double r[3], im[3];
    for (int o = 0; o < 3; ++o) {
      InhomogeneityProblem pb = base;
      pb.order = orders[o];
      r[o] = interior_residual(pb, hist[o], t);
      im[o] = interface_mismatch(pb, hist[o], t);
    }
    res["t" + tag(t)] = {{"interior_residual", {r[0], r[1], r[2]}}, {"interface_mismatch", {im[0], im[1], im[2]}}};
    if (mismatch) {
      g.add("residual_hierarchy_t" + tag(t), r[2], r[0], r[0] >= r[1] && r[1] >= r[2], "uniform >= linear >= quadratic");
      g.add("uniform_interface_largest_t" + tag(t), im[0], std::max(im[1], im[2]), im[0] >= std::max(im[1], im[2]), ">=");
    }
  }
  meta["order_metrics"] = res;

  // far field: five radii above and below the centre, every observation time, against the
  // largest undisturbed temperature on the observation line (the top value without a line)
  {
    InhomogeneityProblem pb = base;
    pb.order = EimOrder::Quadratic;
    double worst = 0;
    for (double t : ob.times) {
      double umax = std::abs(pb.top.at(t));
      if (ob.samples >= 2) {
        umax = 0;
        for (int i = 0; i < ob.samples; ++i) {
          Vec3 x = ob.start + (ob.end - ob.start) * (double(i) / (ob.samples - 1));
          umax = std::max(umax, std::abs(slab_undisturbed(pb.thickness, pb.top, pb.bottom, pb.matrix, x[2], t).d[0]));
        }
      }
      for (int s : {-1, 1}) {
        Vec3 x = pb.center + Vec3(0, 0, s * 5 * pb.radius);
        if (x[2] <= 0 || x[2] >= pb.thickness || umax == 0) continue;
        worst = std::max(worst, std::abs(disturbance(pb, hist[2], x, t)) / umax);
      }
    }
    g.add("far_field_5a", worst, gate, worst < gate, "<");
  }

  // steady anchor: constant top load, long march, uniform order
  {
    InhomogeneityProblem st = base;
    st.top = TopLoad{TopLoad::Kind::Constant, base.top.kind == TopLoad::Kind::Sine ? base.top.amplitude : base.top.value,
                     0, 1};
    if (st.top.value == 0) st.top.value = 1;
    st.grid = TimeGrid{0, 0.5, 100};
    st.order = EimOrder::Uniform;
    auto h = solve_history(st);
    double tE = st.grid.t(st.grid.steps);
    auto f = total_field(st, h, st.center, tE);
    auto u0 = slab_undisturbed(st.thickness, st.top, st.bottom, st.matrix, st.center[2], tE);
    double ratio = f.grad_u[2] / u0.d[1];
    double exact = 3 * st.matrix.K / (st.inclusion.K + 2 * st.matrix.K);
    meta["steady_anchor"] = {{"ratio", ratio}, {"exact", exact}, {"t", tE}};
    g.add("steady_gradient_ratio", ratio, exact, std::abs(ratio - exact) <= 0.01 * exact, "within 1% of");
  }
  if (!mismatch) {
    double mx = 0;
    for (auto& hs : hist)
      for (auto& cf : hs) mx = std::max(mx, pack(cf, EimOrder::Quadratic).cwiseAbs().maxCoeff());
    g.add("zero_mismatch_zero_fields", mx, 0, mx == 0, "==");
  }
  meta["parameters"] = {{"K0", base.matrix.K},      {"Cp0", base.matrix.Cp},     {"KI", base.inclusion.K},
                        {"CpI", base.inclusion.Cp}, {"radius", base.radius},     {"center", {base.center[0], base.center[1], base.center[2]}},
                        {"dt", base.grid.dt},       {"steps", base.grid.steps}};
  meta["gates"] = g.j;
  meta["pass"] = g.ok;
  write_json(opt.out / "eim.json", meta);
  return g.ok ? 0 : 1;
}

}  // namespace cli

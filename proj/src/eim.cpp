#include "eshelby/eim.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

#include "eshelby/parallel.hpp"
#include "eshelby/sphere.hpp"

namespace eshelby {

int unknown_count(EimOrder order) {
  switch (order) {
    case EimOrder::Uniform:
      return 4;
    case EimOrder::Linear:
      return 16;
    case EimOrder::Quadratic:
      return 52;
  }
  return 0;
}

EimOrder parse_order(const std::string& s) {
  if (s == "uniform") return EimOrder::Uniform;
  if (s == "linear") return EimOrder::Linear;
  if (s == "quadratic") return EimOrder::Quadratic;
  throw ConfigError("order must be uniform, linear or quadratic, got '" + s + "'");
}

const char* order_name(EimOrder order) {
  static const char* names[] = {"uniform", "linear", "quadratic"};
  return names[int(order)];
}

void InhomogeneityProblem::validate() const {
  matrix.validate();
  inclusion.validate();
  grid.validate();
  top.validate();
  if (!(radius > 0)) throw PreconditionError("sphere radius must be positive");
  if (!(thickness > 0)) throw PreconditionError("slab thickness must be positive");
  for (int k = 0; k < 2; ++k)
    if (center[k] - radius <= 0 || center[k] + radius >= 1) throw GeometryError("sphere leaves the block sides");
  if (center[2] - radius <= 0 || center[2] + radius >= thickness) throw GeometryError("sphere leaves the block");
}

// ---- JSON ----

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

const json& need(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double num(const json& j, const std::string& where, const char* key) {
  const json& v = need(j, where, key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

Vec3 vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(where + ": expected 3 numbers");
  Vec3 r;
  for (int k = 0; k < 3; ++k) {
    if (!v[k].is_number()) throw ConfigError(where + ": expected 3 numbers");
    r[k] = v[k].get<double>();
  }
  return r;
}

Material material(const json& j, const std::string& where) {
  only_keys(j, where, {"K", "Cp"});
  double K = num(j, where, "K"), Cp = num(j, where, "Cp");
  if (!(K > 0 && Cp > 0)) throw ConfigError(where + ": K and Cp must be positive");
  return Material::make(K, Cp);
}

}  // namespace

InhomogeneityProblem parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  only_keys(j, "problem", {"matrix", "inhomogeneity", "sphere", "slab", "time", "order", "observation"});
  InhomogeneityProblem pb;
  pb.matrix = material(need(j, "problem", "matrix"), "matrix");
  pb.inclusion = material(need(j, "problem", "inhomogeneity"), "inhomogeneity");

  const json& sp = need(j, "problem", "sphere");
  only_keys(sp, "sphere", {"center", "radius"});
  pb.center = vec3(need(sp, "sphere", "center"), "sphere.center");
  pb.radius = num(sp, "sphere", "radius");

  const json& sl = need(j, "problem", "slab");
  only_keys(sl, "slab", {"thickness", "top_bc", "bottom_bc"});
  pb.thickness = num(sl, "slab", "thickness");
  const json& top = need(sl, "slab", "top_bc");
  const json& type = need(top, "slab.top_bc", "type");
  if (type == "sine") {
    only_keys(top, "slab.top_bc", {"type", "amplitude", "period"});
    pb.top.kind = TopLoad::Kind::Sine;
    pb.top.amplitude = num(top, "slab.top_bc", "amplitude");
    pb.top.period = num(top, "slab.top_bc", "period");
  } else if (type == "const") {
    only_keys(top, "slab.top_bc", {"type", "value"});
    pb.top.kind = TopLoad::Kind::Constant;
    pb.top.value = num(top, "slab.top_bc", "value");
  } else {
    throw UnsupportedArgument("slab.top_bc.type must be 'sine' or 'const'");
  }
  const json& bot = need(sl, "slab", "bottom_bc");
  if (bot.is_number()) {
    pb.bottom = bot.get<double>();
  } else {
    only_keys(bot, "slab.bottom_bc", {"type", "value"});
    if (need(bot, "slab.bottom_bc", "type") != "const") throw UnsupportedArgument("slab.bottom_bc must be constant");
    pb.bottom = num(bot, "slab.bottom_bc", "value");
  }

  const json& tm = need(j, "problem", "time");
  only_keys(tm, "time", {"dt", "steps"});
  pb.grid.t0 = 0;
  pb.grid.dt = num(tm, "time", "dt");
  const json& steps = need(tm, "time", "steps");
  if (!steps.is_number_integer()) throw ConfigError("time.steps: expected an integer");
  pb.grid.steps = steps.get<int>();

  if (j.contains("order")) {
    if (!j["order"].is_string()) throw ConfigError("order: expected a string");
    pb.order = parse_order(j["order"].get<std::string>());
  }

  if (j.contains("observation")) {
    const json& ob = j["observation"];
    only_keys(ob, "observation", {"start", "end", "samples", "times"});
    pb.observation.start = vec3(need(ob, "observation", "start"), "observation.start");
    pb.observation.end = vec3(need(ob, "observation", "end"), "observation.end");
    const json& ns = need(ob, "observation", "samples");
    if (!ns.is_number_integer() || ns.get<int>() < 2) throw ConfigError("observation.samples: integer >= 2");
    pb.observation.samples = ns.get<int>();
    const json& ts = need(ob, "observation", "times");
    if (!ts.is_array()) throw ConfigError("observation.times: expected an array");
    for (const auto& t : ts) {
      if (!t.is_number()) throw ConfigError("observation.times: expected numbers");
      pb.observation.times.push_back(t.get<double>());
    }
  }
  try {
    pb.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid problem: ") + e.what());
  }
  return pb;
}

// ---- unknown layout ----

EigenCoeffs unpack(const Eigen::VectorXd& v, EimOrder order) {
  EigenCoeffs c;
  c.Q0 = v[0];
  for (int i = 0; i < 3; ++i) c.U0[i] = v[1 + i];
  if (order >= EimOrder::Linear) {
    for (int p = 0; p < 3; ++p) c.Q1[p] = v[4 + p];
    for (int i = 0; i < 3; ++i)
      for (int p = 0; p < 3; ++p) c.U1(i, p) = v[7 + 3 * i + p];
  }
  if (order == EimOrder::Quadratic) {
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) c.Q2(p, q) = v[16 + 3 * p + q];
    for (int k = 0; k < 27; ++k) c.U2[k] = v[25 + k];
  }
  return c;
}

Eigen::VectorXd pack(const EigenCoeffs& c, EimOrder order) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(unknown_count(order));
  v[0] = c.Q0;
  for (int i = 0; i < 3; ++i) v[1 + i] = c.U0[i];
  if (order >= EimOrder::Linear) {
    for (int p = 0; p < 3; ++p) v[4 + p] = c.Q1[p];
    for (int i = 0; i < 3; ++i)
      for (int p = 0; p < 3; ++p) v[7 + 3 * i + p] = c.U1(i, p);
  }
  if (order == EimOrder::Quadratic) {
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) v[16 + 3 * p + q] = c.Q2(p, q);
    for (int k = 0; k < 27; ++k) v[25 + k] = c.U2[k];
  }
  return v;
}

// ---- response blocks ----

namespace {

using J6 = Jet<double, 3, 6>;

void put(Response& R, int col, const J6& j) {
  R(0, col) = j.value();
  for (int i = 0; i < 3; ++i) {
    std::array<int, 3> e{};
    e[i] = 1;
    R(1 + i, col) = j.deriv(e);
    for (int p = 0; p < 3; ++p) {
      auto ep = e;
      ep[p]++;
      R(4 + 3 * i + p, col) = j.deriv(ep);
      for (int q = 0; q < 3; ++q) {
        auto eq = ep;
        eq[q]++;
        R(13 + 9 * i + 3 * p + q, col) = j.deriv(eq);
      }
    }
  }
}

// full 52-vector at the centre for a single window: pad shorter orders with zeros
Eigen::Matrix<double, 52, 1> full(const EigenCoeffs& c) { return pack(c, EimOrder::Quadratic); }

}  // namespace

Response lag_response(const InhomogeneityProblem& pb, int lag) {
  if (lag < 0) throw PreconditionError("lag_response: lag must be >= 0");
  const double dt = pb.grid.dt;
  LagWindow w{lag * dt, (lag + 1) * dt};
  const Vec3 o = Vec3::Zero();
  auto C = sphere_C_jets<6>(pb.radius, o, w, pb.matrix);
  auto P = lplus_from_C<6>(C, o);
  const double K = pb.matrix.K;
  Response R;
  R.setZero();
  put(R, 0, -1.0 * P.L);
  for (int i = 0; i < 3; ++i) put(R, 1 + i, -K * diff(P.L, i));
  for (int p = 0; p < 3; ++p) put(R, 4 + p, -1.0 * P.Lp[p]);
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p) put(R, 7 + 3 * i + p, -K * diff(P.Lp[p], i));
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) put(R, 16 + 3 * p + q, -1.0 * P.Lpq[p][q]);
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) put(R, 25 + 9 * i + 3 * p + q, -K * diff(P.Lpq[p][q], i));
  return R;
}

namespace {

// disturbance slots at t_g from windows 1..min(g, history size)
Eigen::Matrix<double, 40, 1> history_slots(int g, const std::vector<EigenCoeffs>& history,
                                           const std::vector<Response>& lags, int upto) {
  Eigen::Matrix<double, 40, 1> s = Eigen::Matrix<double, 40, 1>::Zero();
  for (int fp = 1; fp <= upto; ++fp) s += lags[g - fp] * full(history[fp - 1]);
  return s;
}

// undisturbed slots at the centre: value, space derivatives, time derivatives
void undisturbed_slots(const InhomogeneityProblem& pb, double t, Eigen::Matrix<double, 40, 1>& u,
                       Eigen::Matrix<double, 40, 1>& ut) {
  auto f = slab_undisturbed(pb.thickness, pb.top, pb.bottom, pb.matrix, pb.center[2], t);
  u.setZero();
  ut.setZero();
  u[0] = f.d[0];
  ut[0] = f.dt[0];
  u[1 + 2] = f.d[1];
  ut[1 + 2] = f.dt[1];
  u[4 + 8] = f.d[2];
  ut[4 + 8] = f.dt[2];
  u[13 + 26] = f.d[3];
  ut[13 + 26] = f.dt[3];
}

}  // namespace

EquivalentSystem assemble_equivalent_system(const InhomogeneityProblem& pb, int f,
                                            const std::vector<EigenCoeffs>& history,
                                            const std::vector<Response>& lags) {
  if (f < 1 || f > pb.grid.steps) throw PreconditionError("assemble_equivalent_system: step out of range");
  if (int(history.size()) < f - 1) throw PreconditionError("assemble_equivalent_system: history too short");
  if (int(lags.size()) < f) throw PreconditionError("assemble_equivalent_system: lag blocks missing");
  const int n = unknown_count(pb.order);
  const double dt = pb.grid.dt, K0 = pb.matrix.K, KI = pb.inclusion.K, C0 = pb.matrix.Cp, CI = pb.inclusion.Cp;

  auto H = history_slots(f, history, lags, f - 1);
  auto Hprev = f >= 2 ? history_slots(f - 1, history, lags, f - 1) : Eigen::Matrix<double, 40, 1>::Zero().eval();
  Eigen::Matrix<double, 40, 1> u0, u0t;
  undisturbed_slots(pb, pb.grid.t(f), u0, u0t);
  const Response& R0 = lags[0];

  EquivalentSystem sys;
  sys.A = Eigen::MatrixXd::Zero(n, n);
  sys.b = Eigen::VectorXd::Zero(n);
  // equation e pairs with unknown e; heat-source rows use time slots, flux rows space slots
  auto heat_row = [&](int e, int slot, double factor) {
    for (int j = 0; j < n; ++j) sys.A(e, j) = (C0 - CI) / dt * R0(slot, j);
    sys.A(e, e) += factor;
    sys.b[e] = (CI - C0) * u0t[slot] - (C0 - CI) * (H[slot] - Hprev[slot]) / dt;
  };
  auto flux_row = [&](int e, int slot, double factor) {
    for (int j = 0; j < n; ++j) sys.A(e, j) = (K0 - KI) * R0(slot, j);
    sys.A(e, e) -= factor * K0;
    sys.b[e] = (KI - K0) * (u0[slot] + H[slot]);
  };
  heat_row(0, 0, 1);
  for (int i = 0; i < 3; ++i) flux_row(1 + i, 1 + i, 1);
  if (pb.order >= EimOrder::Linear) {
    for (int p = 0; p < 3; ++p) heat_row(4 + p, 1 + p, 1);
    for (int i = 0; i < 3; ++i)
      for (int p = 0; p < 3; ++p) flux_row(7 + 3 * i + p, 4 + 3 * i + p, 1);
  }
  if (pb.order == EimOrder::Quadratic) {
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) heat_row(16 + 3 * p + q, 4 + 3 * p + q, 2);
    for (int k = 0; k < 27; ++k) flux_row(25 + k, 13 + k, 2);
  }
  return sys;
}

std::vector<EigenCoeffs> solve_history(const InhomogeneityProblem& pb) {
  pb.validate();
  const int S = pb.grid.steps;
  std::vector<Response> lags(S);
  parallel_for(S, [&](size_t k) { lags[k] = lag_response(pb, int(k)); });
  std::vector<EigenCoeffs> hist;
  hist.reserve(S);
  for (int f = 1; f <= S; ++f) {
    auto sys = assemble_equivalent_system(pb, f, hist, lags);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double cond = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
    if (!(cond <= 1e12)) throw ConditioningError("equivalent system is singular at step " + std::to_string(f), cond);
    Eigen::VectorXd x = svd.solve(sys.b);
    EigenCoeffs c = unpack(x, pb.order);
    if (pb.order == EimOrder::Quadratic) {
      double scale = c.Q2.cwiseAbs().maxCoeff(), asym = (c.Q2 - c.Q2.transpose()).cwiseAbs().maxCoeff();
      double uscale = 0, uasym = 0;
      for (int i = 0; i < 3; ++i)
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) {
            uscale = std::max(uscale, std::abs(c.U2[9 * i + 3 * p + q]));
            uasym = std::max(uasym, std::abs(c.U2[9 * i + 3 * p + q] - c.U2[9 * i + 3 * q + p]));
          }
      if (asym > 1e-6 * scale || uasym > 1e-6 * uscale)
        throw AccuracyError("quadratic eigen-fields not symmetric at step " + std::to_string(f),
                            std::max(asym, uasym));
    }
    hist.push_back(c);
  }
  return hist;
}

// ---- post-processing ----

namespace {

void check_time(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, double t) {
  if (t < 0 || t > pb.grid.t(pb.grid.steps) * (1 + 1e-12))
    throw DomainError("time outside the solved history");
  if (int(coeffs.size()) < pb.grid.steps) throw PreconditionError("coefficient history shorter than the grid");
}

// window holding t: t_{f-1} < t <= t_f
int active_window(const InhomogeneityProblem& pb, double t) {
  int f = int(std::ceil(t / pb.grid.dt - 1e-9));
  return std::clamp(f, 1, pb.grid.steps);
}

struct Disturbance {
  double u = 0;
  Vec3 g = Vec3::Zero();
};

Disturbance disturbance_at(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, const Vec3& x,
                           double t) {
  Disturbance d;
  Vec3 xr = x - pb.center;
  for (int f = 1; f <= pb.grid.steps; ++f) {
    LagWindow w;
    if (!window_at(pb.grid, f, t, w)) break;
    TensorSet ts = sphere_tensor_set(pb.radius, xr, w, pb.matrix);
    d.u += ts.contract(coeffs[f - 1]);
    d.g += ts.contract_grad(coeffs[f - 1]);
  }
  return d;
}

Vec3 eigen_gradient(const EigenCoeffs& c, const Vec3& xr) {
  Vec3 u = c.U0 + c.U1 * xr;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) u[i] += c.U2[9 * i + 3 * p + q] * xr[p] * xr[q];
  return u;
}

double total_u(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, const Vec3& x, double t) {
  return slab_undisturbed(pb.thickness, pb.top, pb.bottom, pb.matrix, x[2], t).d[0] +
         disturbance_at(pb, coeffs, x, t).u;
}

}  // namespace

FieldSample total_field(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, const Vec3& x,
                        double t) {
  check_time(pb, coeffs, t);
  auto u0 = slab_undisturbed(pb.thickness, pb.top, pb.bottom, pb.matrix, x[2], t);
  Disturbance d = t > 0 ? disturbance_at(pb, coeffs, x, t) : Disturbance{};
  FieldSample s;
  s.u_undisturbed = u0.d[0];
  s.u = u0.d[0] + d.u;
  Vec3 grad = d.g + Vec3(0, 0, u0.d[1]);
  s.grad_u = grad;
  Vec3 xr = x - pb.center;
  if (t > 0 && xr.norm() < pb.radius) grad -= eigen_gradient(coeffs[active_window(pb, t) - 1], xr);
  s.q = -pb.matrix.K * grad;
  return s;
}

double disturbance(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, const Vec3& x, double t) {
  check_time(pb, coeffs, t);
  return t > 0 ? disturbance_at(pb, coeffs, x, t).u : 0.0;
}

double interior_residual(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, double t) {
  check_time(pb, coeffs, t);
  if (!(t > 0)) throw DomainError("interior_residual: t must be positive");
  const double a = pb.radius, ht = 1e-3 * pb.grid.dt, hx = a / 50;
  const Vec3 c = pb.center;
  const Vec3 probes[5] = {c, c + Vec3(0, 0, a / 2), c - Vec3(0, 0, a / 2), c + Vec3(a / 2, 0, 0),
                          c - Vec3(a / 2, 0, 0)};
  double sum = 0, ref = 0;
  for (const Vec3& x : probes) {
    double u = total_u(pb, coeffs, x, t);
    double ut = (3 * u - 4 * total_u(pb, coeffs, x, t - ht) + total_u(pb, coeffs, x, t - 2 * ht)) / (2 * ht);
    double lap = 0;
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = hx;
      lap += (total_u(pb, coeffs, x + e, t) - 2 * u + total_u(pb, coeffs, x - e, t)) / (hx * hx);
    }
    double r = pb.inclusion.Cp * ut - pb.inclusion.K * lap;
    sum += r * r;
    auto f0 = slab_undisturbed(pb.thickness, pb.top, pb.bottom, pb.matrix, x[2], t);
    ref = std::max(ref, pb.inclusion.Cp * std::abs(f0.dt[0]));
  }
  return std::sqrt(sum / 5) / (ref > 0 ? ref : 1.0);
}

double interface_mismatch(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, double t) {
  check_time(pb, coeffs, t);
  if (!(t > 0)) throw DomainError("interface_mismatch: t must be positive");
  const double r = pb.radius * (1 - 1e-6);
  const EigenCoeffs& c = coeffs[active_window(pb, t) - 1];
  double worst = 0;
  for (int k = 0; k < 3; ++k)
    for (int s : {-1, 1}) {
      Vec3 xr = Vec3::Zero();
      xr[k] = s * r;
      Vec3 x = pb.center + xr;
      auto f0 = slab_undisturbed(pb.thickness, pb.top, pb.bottom, pb.matrix, x[2], t);
      Vec3 grad = disturbance_at(pb, coeffs, x, t).g + Vec3(0, 0, f0.d[1]);
      Vec3 miss = pb.matrix.K * (grad - eigen_gradient(c, xr)) - pb.inclusion.K * grad;
      worst = std::max(worst, miss.norm());
    }
  auto fc = slab_undisturbed(pb.thickness, pb.top, pb.bottom, pb.matrix, pb.center[2], t);
  double ref = pb.matrix.K * std::abs(fc.d[1]);
  return worst / (ref > 0 ? ref : 1.0);
}

}  // namespace eshelby

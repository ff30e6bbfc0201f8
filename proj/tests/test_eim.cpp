#include <doctest.h>

#include <cmath>

#include "eshelby/eim.hpp"

using namespace eshelby;

namespace {

const char* kProblem = R"({
  "matrix": {"K": 1.0, "Cp": 10.0},
  "inhomogeneity": {"K": 10.0, "Cp": 12.0},
  "sphere": {"center": [0.5, 0.5, 1.3], "radius": 0.1},
  "slab": {
    "thickness": 2.0,
    "top_bc": {"type": "sine", "amplitude": 10.0, "period": 20.0},
    "bottom_bc": {"type": "const", "value": 0.0}
  },
  "time": {"dt": 0.5, "steps": STEPS},
  "order": "ORDER"
})";

std::string problem_text(int steps, const std::string& order) {
  std::string s = kProblem;
  s.replace(s.find("STEPS"), 5, std::to_string(steps));
  s.replace(s.find("ORDER"), 5, order);
  return s;
}

}  // namespace

TEST_CASE("slab field: start, boundaries and heat equation") {
  Material m = Material::make(1.0, 10.0);
  TopLoad top{TopLoad::Kind::Sine, 10.0, 5.0, 6.0};
  CHECK(slab_undisturbed(2.0, top, 0.0, m, 1.0, 0.0).d[0] == 0.0);
  CHECK(slab_undisturbed(2.0, top, 0.0, m, 2.0, 0.7).d[0] == doctest::Approx(top.at(0.7)).epsilon(1e-10));
  CHECK(slab_undisturbed(2.0, top, 1.5, m, 0.0, 0.7).d[0] == doctest::Approx(1.5).epsilon(1e-10));
  for (double t : {0.3, 1.0, 4.0}) {
    for (double x3 : {0.4, 1.3}) {
      UndisturbedField u = slab_undisturbed(2.0, top, 0.0, m, x3, t);
      CHECK(u.dt[0] == doctest::Approx(m.alpha * u.d[2]).epsilon(1e-7).scale(1e-7));
      double h = 1e-4;
      double fd = (slab_undisturbed(2.0, top, 0.0, m, x3, t + h).d[0] -
                   slab_undisturbed(2.0, top, 0.0, m, x3, t - h).d[0]) / (2 * h);
      CHECK(u.dt[0] == doctest::Approx(fd).epsilon(1e-6).scale(1e-6));
      double fx = (slab_undisturbed(2.0, top, 0.0, m, x3 + h, t).d[0] -
                   slab_undisturbed(2.0, top, 0.0, m, x3 - h, t).d[0]) / (2 * h);
      CHECK(u.d[1] == doctest::Approx(fx).epsilon(1e-6).scale(1e-6));
    }
  }
  CHECK_THROWS_AS(slab_undisturbed(2.0, top, 0.0, m, 2.5, 1.0), DomainError);
  CHECK_THROWS_AS(slab_undisturbed(2.0, top, 0.0, m, 1.0, -1.0), DomainError);
}

TEST_CASE("slab field reaches the linear steady profile") {
  Material m = Material::make(1.0, 10.0);
  TopLoad top{TopLoad::Kind::Constant, 10.0, 0.0, 1.0};
  UndisturbedField u = slab_undisturbed(2.0, top, 2.0, m, 0.5, 2000.0);
  CHECK(u.d[0] == doctest::Approx(2.0 + 8.0 * 0.25).epsilon(1e-9));
  CHECK(u.d[1] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(std::abs(u.dt[0]) < 1e-9);
}

TEST_CASE("problem parsing") {
  InhomogeneityProblem pb = parse_problem(problem_text(4, "linear"));
  CHECK(pb.order == EimOrder::Linear);
  CHECK(pb.grid.steps == 4);
  CHECK(pb.top.kind == TopLoad::Kind::Sine);
  CHECK(pb.matrix.alpha == doctest::Approx(0.1));
  CHECK(unknown_count(EimOrder::Uniform) == 4);
  CHECK(unknown_count(EimOrder::Linear) == 16);
  CHECK(unknown_count(EimOrder::Quadratic) == 52);

  std::string extra = problem_text(4, "linear");
  extra.insert(1, "\"colour\": 1,");
  CHECK_THROWS_AS(parse_problem(extra), ConfigError);
  CHECK_THROWS_AS(parse_problem(problem_text(4, "cubic")), ConfigError);
  CHECK_THROWS_AS(parse_problem("{"), ConfigError);
  std::string outside = problem_text(4, "linear");
  outside.replace(outside.find("1.3]"), 3, "1.95");
  CHECK_THROWS(parse_problem(outside));
}

TEST_CASE("pack and unpack are inverse") {
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(52, 1, 52);
  EigenCoeffs c = unpack(v, EimOrder::Quadratic);
  CHECK(c.Q0 == 1);
  CHECK(c.U0[2] == 4);
  CHECK(c.Q1[0] == 5);
  CHECK((pack(c, EimOrder::Quadratic) - v).norm() == 0.0);
  Eigen::VectorXd u = v.head(16);
  CHECK((pack(unpack(u, EimOrder::Linear), EimOrder::Linear) - u).norm() == 0.0);
}

TEST_CASE("matching materials give no eigen-fields") {
  InhomogeneityProblem pb = parse_problem(problem_text(3, "linear"));
  pb.inclusion = pb.matrix;
  auto coeffs = solve_history(pb);
  REQUIRE(coeffs.size() == 3);
  for (const auto& c : coeffs) {
    CHECK(pack(c, EimOrder::Linear).norm() == 0.0);
  }
  CHECK(interface_mismatch(pb, coeffs, 1.5) < 1e-12);
}

TEST_CASE("later steps do not change earlier ones") {
  InhomogeneityProblem a = parse_problem(problem_text(3, "uniform"));
  InhomogeneityProblem b = parse_problem(problem_text(5, "uniform"));
  auto ca = solve_history(a);
  auto cb = solve_history(b);
  for (int f = 0; f < 3; ++f) CHECK((pack(ca[f], EimOrder::Uniform) - pack(cb[f], EimOrder::Uniform)).norm() == 0.0);
  // the disturbance only exists after the first window opens
  CHECK(disturbance(b, cb, Vec3(0.5, 0.5, 1.6), 0.0) == 0.0);
}

TEST_CASE("quadratic eigen-fields keep their index symmetry") {
  InhomogeneityProblem pb = parse_problem(problem_text(2, "quadratic"));
  auto coeffs = solve_history(pb);
  for (const auto& c : coeffs) {
    double scale = c.Q2.norm() + 1e-30;
    CHECK((c.Q2 - c.Q2.transpose()).norm() <= 1e-6 * scale);
    double us = 0, asym = 0;
    for (int i = 0; i < 3; ++i)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
          us += std::abs(c.U2[i * 9 + p * 3 + q]);
          asym += std::abs(c.U2[i * 9 + p * 3 + q] - c.U2[i * 9 + q * 3 + p]);
        }
    CHECK(asym <= 1e-6 * (us + 1e-30));
  }
}

TEST_CASE("inclusion draws heat toward the more conductive sphere") {
  InhomogeneityProblem pb = parse_problem(problem_text(4, "uniform"));
  auto coeffs = solve_history(pb);
  FieldSample in = total_field(pb, coeffs, pb.center, 2.0);
  // the conductive sphere flattens the gradient inside it
  CHECK(std::abs(in.grad_u[2]) < std::abs(slab_undisturbed(2.0, pb.top, 0.0, pb.matrix, 1.3, 2.0).d[1]));
  CHECK(std::isfinite(interior_residual(pb, coeffs, 2.0)));
}

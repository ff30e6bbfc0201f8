#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eshelby/slab.hpp"
#include "eshelby/transient.hpp"

namespace eshelby {

enum class EimOrder { Uniform = 0, Linear = 1, Quadratic = 2 };

int unknown_count(EimOrder order);  // 4, 16, 52
EimOrder parse_order(const std::string& s);
const char* order_name(EimOrder order);

struct ObservationLine {
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::Zero();
  int samples = 0;
  std::vector<double> times;
};

struct InhomogeneityProblem {
  Material matrix;
  Material inclusion;
  Vec3 center = Vec3::Zero();
  double radius = 0;
  double thickness = 0;  // the block spans [0, 1] x [0, 1] x [0, thickness]
  TopLoad top;
  double bottom = 0;
  TimeGrid grid;
  EimOrder order = EimOrder::Quadratic;
  ObservationLine observation;

  void validate() const;
};

// Parses the JSON problem document; unknown keys raise ConfigError.
InhomogeneityProblem parse_problem(const std::string& json_text);

// Unknown vector layout: [Q0, U0(3) | Q1(3), U1(9) | Q2(9), U2(27)], U1 as (i, p), U2 as (i, p, q).
EigenCoeffs unpack(const Eigen::VectorXd& v, EimOrder order);
Eigen::VectorXd pack(const EigenCoeffs& c, EimOrder order);

// Disturbance derivatives at the sphere centre, one row per slot:
// [u, u_i (3), u_ip (9), u_ipq (27)] = 40 rows, one column per unknown.
using Response = Eigen::Matrix<double, 40, 52>;

// Response of window f to a unit coefficient, seen at t_f + lag·dt (lag >= 0).
Response lag_response(const InhomogeneityProblem& pb, int lag);

struct EquivalentSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

// Equivalent flux and heat-source conditions at the centre at t_f (f is 1-based).
// history holds the coefficients of windows 1..f-1; lags caches lag_response(pb, k).
EquivalentSystem assemble_equivalent_system(const InhomogeneityProblem& pb, int f,
                                            const std::vector<EigenCoeffs>& history,
                                            const std::vector<Response>& lags);

// Marches all steps; entry f-1 holds the coefficients of window f.
std::vector<EigenCoeffs> solve_history(const InhomogeneityProblem& pb);

struct FieldSample {
  double u = 0;
  Vec3 q = Vec3::Zero();
  Vec3 grad_u = Vec3::Zero();
  double u_undisturbed = 0;
};

// Undisturbed slab field plus the inclusion disturbance. Inside the sphere the flux is
// -K⁰(∇u - u*), outside -K⁰∇u.
FieldSample total_field(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, const Vec3& x,
                        double t);

// disturbance only, u - u⁰
double disturbance(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, const Vec3& x, double t);

// RMS of Cp^I ∂u/∂t - K^I ∇²u over five interior probes, divided by Cp^I max|∂u⁰/∂t| there
double interior_residual(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, double t);

// max over interface probes (inner side) of |K⁰(∇u - u*) - K^I ∇u|, divided by K^I |∇u⁰(centre)|
double interface_mismatch(const InhomogeneityProblem& pb, const std::vector<EigenCoeffs>& coeffs, double t);

}  // namespace eshelby

#pragma once

#include <array>

#include "eshelby/geometry.hpp"

namespace eshelby {

// Top boundary temperature of the slab: value + amplitude·sin(2π t / period).
// A constant load has amplitude 0.
struct TopLoad {
  enum class Kind { Constant, Sine };
  Kind kind = Kind::Constant;
  double value = 0;
  double amplitude = 0;
  double period = 1;
  double at(double t) const;
  void validate() const;
};

// u⁰ on 0 <= x3 <= H with u(0) = bottom, u(H) = top(t), insulated sides, zero start.
// d[k] = ∂^k u / ∂x3^k, dt[k] = ∂/∂t ∂^k u / ∂x3^k.
struct UndisturbedField {
  std::array<double, 4> d{};
  std::array<double, 4> dt{};
  int terms = 0;  // eigenfunction terms summed
};

UndisturbedField slab_undisturbed(double thickness, const TopLoad& top, double bottom, const Material& mat, double x3,
                                  double t);

}  // namespace eshelby

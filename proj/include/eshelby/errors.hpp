#pragma once

#include <stdexcept>
#include <string>

namespace eshelby {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct UnsupportedOrder : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IntervalError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// carries the achieved error estimate so callers can decide what to do
struct AccuracyError : std::runtime_error {
  double estimate;
  AccuracyError(const std::string& what, double est)
      : std::runtime_error(what + " (estimate " + std::to_string(est) + ")"), estimate(est) {}
};

struct MeshTopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConditioningError : std::runtime_error {
  double condition;
  ConditioningError(const std::string& what, double c)
      : std::runtime_error(what), condition(c) {}
};

struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-fatal conditions noticed during an evaluation.
struct Flags {
  bool nudged = false;          // point moved off an edge line
  bool near_interface = false;  // point within 1e-9 of a face plane
  bool series_unconverged = false;
  void merge(const Flags& o) {
    nudged |= o.nudged;
    near_interface |= o.near_interface;
    series_unconverged |= o.series_unconverged;
  }
};

}  // namespace eshelby

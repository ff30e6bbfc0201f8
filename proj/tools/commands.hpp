#pragma once

#include <optional>

#include "output.hpp"

namespace cli {

struct RunOptions {
  fs::path config;  // empty: built-in defaults
  fs::path out;
  std::optional<int> n_max;
  std::optional<double> gate;  // percent
};

// Each returns the process exit status: 0 when every gate passes, 1 otherwise.
int cmd_verify_helmholtz(const RunOptions& opt);
int cmd_verify_sphere(const RunOptions& opt);
int cmd_cuboid_maps(const RunOptions& opt);
int cmd_eim(const RunOptions& opt);

}  // namespace cli

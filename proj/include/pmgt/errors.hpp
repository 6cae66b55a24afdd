#pragma once

#include <stdexcept>
#include <string>

namespace pmgt {

// Bad user input: malformed files, invalid config values, label domains.
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Topology that cannot support gossip (disconnected, lambda2 >= 1, ...).
struct topology_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf produced by an iterative computation.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iteration cap reached before the requested tolerance.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pmgt

#pragma once

#include <stdexcept>
#include <string>

namespace rydgate {

/// Malformed or inconsistent scenario configuration. Messages carry the
/// offending field path, e.g. "drives.delta: must be positive".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrator or linear-algebra failure (non-finite state, singular block).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rydgate

#pragma once

#include <stdexcept>
#include <string>

namespace ohara {

// Bad input: parameters out of range, malformed files, degenerate curves.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The computation itself broke down: under-resolved curves, singular pairs, stalled flows.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace ohara

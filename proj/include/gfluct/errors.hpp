#pragma once

#include <stdexcept>
#include <string>

namespace gfluct {

// Invalid inputs: malformed JSON, out-of-range probabilities, mismatched
// dimensions. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation was requested beyond its enumeration guard (n^k caps,
// isomorphism size cap, ...). The CLI maps this to exit code 3.
struct FeasibilityError : std::runtime_error {
  explicit FeasibilityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gfluct

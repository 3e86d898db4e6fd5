#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qdent {

/// Bad arguments, malformed configuration, incomplete measurement sets.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Files that exist but cannot be parsed.
class DataCorruption : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer non-convergence, unphysical corrections, too many failed trials.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal notes collected by operations that clamp or approximate.
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

}  // namespace qdent

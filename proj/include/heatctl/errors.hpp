#pragma once

#include <stdexcept>
#include <string>

namespace heatctl {

/// Bad user input: dimensions, ranges, unknown names.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A stability/noise hypothesis failed; the requested run is not certified.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulation produced a non-finite value and the path was aborted.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, long step)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace heatctl

#pragma once

#include <stdexcept>
#include <string>

namespace carnot {

// Inputs that do not conform to the group or grid they are used with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical procedure finished but missed its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

// Mass lost to the box or to kernel truncation exceeds the tolerance.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double tail)
      : std::runtime_error(what), tail_(tail) {}
  double tail() const { return tail_; }

 private:
  double tail_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace carnot

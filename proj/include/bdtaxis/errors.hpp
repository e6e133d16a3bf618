#pragma once

#include <stdexcept>
#include <string>

namespace bdtaxis {

/// Parameters or initial data violate a model hypothesis.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The discrete solution left the admissible set (negativity beyond
/// tolerance, non-finite values, or a retreating front).
class InstabilityDetected : public std::runtime_error {
 public:
  InstabilityDetected(const std::string& what, double time)
      : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class TridiagonalSingular : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form certificate whose hypotheses do not hold.
class NotApplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bdtaxis

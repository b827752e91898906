#pragma once

#include <stdexcept>
#include <string>

namespace wavelab {

// Invalid parameters or run settings, detected before any computation starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fields that do not live on the same grid.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An input violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A time stepper produced non-finite values.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace wavelab

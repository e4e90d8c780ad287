#pragma once

#include <stdexcept>
#include <string>

namespace mlmcq {

/// Precondition violation on a public entry point.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Too many samples produced non-finite states or hit the volatility floor.
class FlaggedSampleLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// MLMC could not meet its bias target below the configured level cap.
class LevelCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A level variance came out as exactly zero, so a log-regression is undefined.
class DegenerateRegression : public std::runtime_error {
 public:
  DegenerateRegression(int level, const std::string& what)
      : std::runtime_error(what), level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

class NotImplemented : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mlmcq

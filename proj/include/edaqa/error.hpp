#pragma once

#include <stdexcept>
#include <string>

namespace edaqa {

/// Input violates an operation's precondition (bad length, misaligned
/// windows, non-finite samples, ...).
class RejectedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computed feature is not finite. Carries the 0-based feature index.
class FeatureError : public std::runtime_error {
 public:
  FeatureError(int index, const std::string& what)
      : std::runtime_error(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// A solver produced non-finite values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edaqa

#pragma once

#include <stdexcept>
#include <string>

namespace rhg {

/// Invalid parameters, violated preconditions, malformed files.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A floating-point clamp larger than the tolerated rounding slack.
class NumericHealthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

}  // namespace rhg

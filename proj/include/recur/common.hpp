#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace recur {

using Int = long long;

/// Raised when an enumeration would exceed its configured element cap.
class cap_exceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computation cannot proceed within the given budget,
/// e.g. a sequence with no usable tail or an address query past the
/// supported depth.
class budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or malformed input (CLI maps this to exit code 2).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A certified-True verdict coexists with a certified-False one.
class inconsistency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t default_ball_cap = 2'000'000;

}  // namespace recur

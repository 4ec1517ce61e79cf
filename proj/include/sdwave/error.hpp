#pragma once

#include <stdexcept>
#include <string>

namespace sdwave {

/// Argument outside the documented domain of an operation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent configuration file / problem description.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not produce a result (e.g. no admissible T0).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string &what) {
  if (!ok) throw InvalidArgument(what);
}
}  // namespace detail

}  // namespace sdwave

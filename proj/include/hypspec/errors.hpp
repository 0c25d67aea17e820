#pragma once

#include <stdexcept>
#include <string>

namespace hypspec {

/// Bad input: violated preconditions, malformed manifests, invalid graphs.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that did not reach its contract (eigensolver stalled,
/// insufficient Monte-Carlo tail, broken invariant). Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace hypspec

#pragma once
#include <stdexcept>
#include <string>

namespace airylab {

// Invalid or inconsistent configuration / precondition violation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the supported numerical range of an evaluator.
class RangeError : public std::runtime_error {
 public:
  explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (non-convergence, degeneracy).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Rejection sampler exhausted its attempt budget. Carries the count so the
// caller can decide on a fallback.
class RejectionError : public std::runtime_error {
 public:
  RejectionError(const std::string& what, long long attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  long long attempts() const { return attempts_; }

 private:
  long long attempts_;
};

// A statistical test was invoked with too few replicas to say anything.
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace airylab

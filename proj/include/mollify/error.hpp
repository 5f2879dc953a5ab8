#pragma once

#include <stdexcept>
#include <string>

namespace mollify {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* code() const noexcept { return "error"; }
};

#define MOLLIFY_DEFINE_ERROR(Name, Code)                                  \
  class Name : public Error {                                             \
   public:                                                                \
    using Error::Error;                                                   \
    const char* code() const noexcept override { return Code; }           \
  };

MOLLIFY_DEFINE_ERROR(InvalidDomainError, "invalid-domain")
MOLLIFY_DEFINE_ERROR(InvalidSpecError, "invalid-spec")
MOLLIFY_DEFINE_ERROR(InvalidInputError, "invalid-input")
MOLLIFY_DEFINE_ERROR(DimensionMismatchError, "dimension-mismatch")
MOLLIFY_DEFINE_ERROR(ConstantViolationError, "constant-violation")
MOLLIFY_DEFINE_ERROR(NotApplicableError, "not-applicable")
MOLLIFY_DEFINE_ERROR(OutOfSetError, "out-of-set")
MOLLIFY_DEFINE_ERROR(MatchingInfeasibleError, "matching-infeasible")
MOLLIFY_DEFINE_ERROR(NoSolutionError, "no-solution")
MOLLIFY_DEFINE_ERROR(ConfigError, "invalid-config")

#undef MOLLIFY_DEFINE_ERROR

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time) : Error(what), time_(time) {}
  const char* code() const noexcept override { return "divergence"; }
  double time() const noexcept { return time_; }

 private:
  double time_;
};

inline void require_dimension(long expected, long actual, const char* what) {
  if (expected != actual) {
    throw DimensionMismatchError(std::string(what) + ": expected dimension " +
                                 std::to_string(expected) + ", got " + std::to_string(actual));
  }
}

}  // namespace mollify

#pragma once

#include <stdexcept>
#include <string>

namespace nilext {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold for its input.
class PreconditionError : public Error {
public:
  using Error::Error;
};

// An enumeration would exceed the configured budget.
class BudgetError : public Error {
public:
  using Error::Error;
};

// Exact integer arithmetic left the 64-bit range.
class OverflowError : public Error {
public:
  using Error::Error;
};

// A checked algebraic identity failed. Always a bug or corrupted input.
class IdentityViolation : public Error {
public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

inline void check_identity(bool cond, const std::string& what) {
  if (!cond) throw IdentityViolation(what);
}

}  // namespace nilext

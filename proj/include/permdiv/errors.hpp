#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace permdiv {

/// Base of every error the library throws. The CLI maps each subclass to a
/// distinct exit status (see tools/permdiv.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input: bad degree, non-bijection, repeated row...
class InputError : public Error {
 public:
  using Error::Error;
};

/// A theorem-level hypothesis does not hold (n < 500, family not r-spread).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// An exponential search ran past its configured node budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Output failed a post-condition. Always a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Counts work units for exponential searches and throws BudgetExceeded once
/// the limit is crossed.
class WorkBudget {
 public:
  explicit WorkBudget(std::uint64_t limit) : limit_(limit) {}

  void charge(std::uint64_t units, const char* what) {
    used_ += units;
    if (used_ > limit_) {
      throw BudgetExceeded(std::string(what) + ": work budget of " + std::to_string(limit_) +
                           " units exceeded");
    }
  }

  std::uint64_t used() const { return used_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

}  // namespace permdiv

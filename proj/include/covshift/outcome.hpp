#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace covshift {

/// Why a numerical procedure declined to return a result. These are data
/// outcomes (tabulated as a dash in reports), not programming errors.
enum class FailureKind {
  SingularCovariance,   ///< covariance not positive definite
  EmptyClassWeight,     ///< a class received zero total weight
  NonFiniteObjective,   ///< optimizer produced NaN/Inf
  ConstraintViolated,   ///< fitted model misses its normalisation constraint
  LinearSolveFailed,    ///< closed-form solve failed or residual too large
  WeightStarvation,     ///< too few strictly positive weights
  InvalidSplit,         ///< split could not be constructed for this draw
};

const char* to_string(FailureKind kind) noexcept;

struct Failure {
  FailureKind kind;
  std::string message;
};

/// Either a value or a typed Failure. Minimal stand-in for std::expected,
/// which is not available in C++20.
template <class T>
class Outcome {
 public:
  Outcome(T value) : state_(std::move(value)) {}
  Outcome(Failure failure) : state_(std::move(failure)) {}

  bool ok() const noexcept { return std::holds_alternative<T>(state_); }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& {
    if (!ok()) throw std::logic_error("Outcome::value() on failure: " + failure().message);
    return std::get<T>(state_);
  }
  T& value() & {
    if (!ok()) throw std::logic_error("Outcome::value() on failure: " + failure().message);
    return std::get<T>(state_);
  }
  T&& value() && {
    if (!ok()) throw std::logic_error("Outcome::value() on failure: " + failure().message);
    return std::get<T>(std::move(state_));
  }
  const T* operator->() const { return &value(); }
  const T& operator*() const& { return value(); }

  const Failure& failure() const { return std::get<Failure>(state_); }

 private:
  std::variant<T, Failure> state_;
};

inline Failure make_failure(FailureKind kind, std::string message) {
  return Failure{kind, std::move(message)};
}

}  // namespace covshift

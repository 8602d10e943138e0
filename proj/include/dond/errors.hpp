#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace dond {

// Base of every error raised by the engine. `code()` is the stable
// machine-readable identifier used in JSON error payloads.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message,
        std::optional<int> round = std::nullopt)
      : std::runtime_error(message), code_(std::move(code)), round_(round) {}

  const std::string& code() const noexcept { return code_; }
  std::optional<int> round() const noexcept { return round_; }

 private:
  std::string code_;
  std::optional<int> round_;
};

// Argument outside a function's domain (e.g. log of a non-positive amount).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error("domain_error", message) {}
};

// Value outside the attainable range of an inverse.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& message)
      : Error("range_error", message) {}
};

class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(const std::string& message)
      : Error("non_finite", message) {}
};

// Structurally invalid input: bad ladder, schedule, trajectory, descriptor.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message,
                           std::optional<int> round = std::nullopt)
      : Error("validation_error", message, round) {}
};

// The requested solve exceeds the configured state/edge budget.
class GuardError : public Error {
 public:
  explicit GuardError(const std::string& message)
      : Error("guard_exceeded", message) {}
};

class UnboundedError : public Error {
 public:
  explicit UnboundedError(const std::string& message)
      : Error("unbounded", message) {}
};

}  // namespace dond

#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

// Base of every error thrown by the library. `kind()` is a short stable tag
// used in machine-readable error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain_error", message) {}
};

// Physical parameters violating a model invariant.
class InvalidParams : public Error {
 public:
  explicit InvalidParams(const std::string& message) : Error("invalid_params", message) {}
};

// A numerical procedure could not deliver its postcondition.
class SolverError : public Error {
 public:
  SolverError(const std::string& kind, const std::string& message) : Error(kind, message) {}
};

}  // namespace floquet

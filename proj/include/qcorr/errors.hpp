#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcorr {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input failed a structural check (Hermiticity, trace, dimensions).
/// Carries one message per violated invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  explicit ValidationError(const std::string& what)
      : ValidationError(std::vector<std::string>{what}) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// A matrix expected to be positive semidefinite has an eigenvalue below the clamp window.
class NotPsdError : public Error {
 public:
  explicit NotPsdError(double min_eigenvalue)
      : Error("matrix is not positive semidefinite (min eigenvalue " +
              std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// (r, s) outside the physical triangle. The message names the violated eigenvalue.
class InvalidParamsError : public Error {
 public:
  using Error::Error;
};

/// Density matrix is not of the two-parameter X-state shape.
class NotInFamilyError : public Error {
 public:
  NotInFamilyError(const std::string& what, double max_residual)
      : Error(what), max_residual_(max_residual) {}
  double max_residual() const noexcept { return max_residual_; }

 private:
  double max_residual_;
};

/// Argument outside the mathematical domain of a function (negative time, Gamma <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcorr

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace acc {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatch, empty input, out-of-range settings.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A parameter outside the model's domain (e.g. a negative scale).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Particle weights sum to zero.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// No proposal accepted before the attempt cap.
class ToleranceTooSmallError : public Error {
 public:
  ToleranceTooSmallError(std::size_t attempts, double tolerance);

  std::size_t attempts() const { return attempts_; }
  double tolerance() const { return tolerance_; }

 private:
  std::size_t attempts_;
  double tolerance_;
};

/// Importance weights all zero or non-finite.
class SupportMismatchError : public Error {
 public:
  using Error::Error;
};

/// Regression design without full column rank.
class SingularDesignError : public Error {
 public:
  explicit SingularDesignError(std::vector<std::size_t> columns);

  const std::vector<std::size_t>& columns() const { return columns_; }

 private:
  std::vector<std::size_t> columns_;
};

/// W(., s_obs) is not monotone over the search bracket.
class NonMonotoneMapError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected before any simulation ran.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace acc

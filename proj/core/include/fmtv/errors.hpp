#pragma once

#include <stdexcept>
#include <string>

namespace fmtv {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Request exceeds a configured computational cap or sample-size floor.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Covariance matrix could not be factorized (numerically not PSD).
class CovarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rate tables only cover the CLT regime 0 < H < 1 - 1/(2q).
class RegimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Statistic/degree combination with no tabulated rate.
class NotTabulatedError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace fmtv

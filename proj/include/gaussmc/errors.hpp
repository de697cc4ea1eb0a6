#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaussmc {

// Base of every error raised by the library. The CLI maps NumericError and
// its subclasses to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Requested operation would materialize a matrix above the configured cap.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::size_t requested, std::size_t cap)
      : Error(what + " (d=" + std::to_string(requested) + ", cap=" + std::to_string(cap) + ")"),
        requested_(requested),
        cap_(cap) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Cholesky pivot fell below tolerance; the matrix is not positive definite
// to working precision.
class FactorizationError : public NumericError {
 public:
  FactorizationError(std::size_t pivot_index, double pivot_value)
      : NumericError("cholesky: pivot " + std::to_string(pivot_index) +
                     " is not positive (value " + std::to_string(pivot_value) + ")"),
        pivot_index_(pivot_index),
        pivot_value_(pivot_value) {}

  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double pivot_value() const noexcept { return pivot_value_; }

 private:
  std::size_t pivot_index_;
  double pivot_value_;
};

class NotPsdError : public NumericError {
 public:
  explicit NotPsdError(double min_eigenvalue)
      : NumericError("matrix is not positive semi-definite (min eigenvalue " +
                     std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

}  // namespace gaussmc

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nmfc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-conforming shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Data violates a precondition: negative or non-finite entries, asymmetry.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A factor or input has a zero vector where a nonzero one is required.
class DegenerateError : public Error {
 public:
  DegenerateError(const std::string& what, std::ptrdiff_t index = -1)
      : Error(what), index_(index) {}
  std::ptrdiff_t index() const { return index_; }

 private:
  std::ptrdiff_t index_;
};

/// An item (or feature) whose indicator vector is all zero.
class UnassignedError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class RankError : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Iteration budget exhausted; carries the best iterate found.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd best)
      : Error(what), best_(std::move(best)) {}
  const Eigen::VectorXd& best_iterate() const { return best_; }

 private:
  Eigen::VectorXd best_;
};

}  // namespace nmfc

#pragma once

#include <stdexcept>
#include <string>

namespace oplab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(int lhs, int rhs, const std::string& where)
      : Error(where + ": dimension mismatch (" + std::to_string(lhs) + " vs " + std::to_string(rhs) + ")"),
        lhs_(lhs),
        rhs_(rhs) {}
  int lhs() const { return lhs_; }
  int rhs() const { return rhs_; }

 private:
  int lhs_;
  int rhs_;
};

class NotHermitian : public Error {
 public:
  NotHermitian(double residual, double bound)
      : Error("matrix is not Hermitian: residual " + std::to_string(residual) + " exceeds " +
              std::to_string(bound)),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Raised when a negative or fractional power is requested of a matrix whose
/// smallest eigenvalue does not clear the positivity gate.
class NearSingular : public Error {
 public:
  NearSingular(double lambda_min, double threshold)
      : Error("near-singular input: lambda_min " + std::to_string(lambda_min) + " <= eps_pd " +
              std::to_string(threshold)),
        lambda_min_(lambda_min),
        threshold_(threshold) {}
  double lambda_min() const { return lambda_min_; }
  double threshold() const { return threshold_; }

 private:
  double lambda_min_;
  double threshold_;
};

class DecompositionFailure : public Error {
 public:
  DecompositionFailure(int dim, double condition_estimate)
      : Error("eigen-solver did not converge (dim " + std::to_string(dim) + ", condition estimate " +
              std::to_string(condition_estimate) + ")"),
        dim_(dim),
        condition_estimate_(condition_estimate) {}
  int dim() const { return dim_; }
  double condition_estimate() const { return condition_estimate_; }

 private:
  int dim_;
  double condition_estimate_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class UnboundName : public Error {
 public:
  explicit UnboundName(const std::string& name) : Error("unbound name: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Internal-consistency failure: an expression that must evaluate to a
/// Hermitian matrix did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace oplab

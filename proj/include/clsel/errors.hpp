#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace clsel {

// Invalid user input: out-of-range spec values, malformed files, shape
// mismatches. Mapped to exit code 2 by the CLI.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown during estimation. Objective evaluation converts these
// into an infinite objective value instead of aborting a chain.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Both Gibbs candidates infinite: no valid state to move to.
class DegenerateStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, Eigen::VectorXd last_iterate,
                      double score_norm)
      : NumericalError(what),
        last_iterate_(std::move(last_iterate)),
        score_norm_(score_norm) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double score_norm() const { return score_norm_; }

 private:
  Eigen::VectorXd last_iterate_;
  double score_norm_;
};

}  // namespace clsel

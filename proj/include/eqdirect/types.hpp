#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace eqd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Wrong arguments (dimension mismatch, invalid parameter values).
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Malformed problem or records files.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Structurally valid data that violates a mathematical invariant.
class InvariantError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical failure, e.g. an inner solver that did not converge.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace eqd

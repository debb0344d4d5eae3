#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace semcom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

// Violated input contract (bad shapes, bad config values, bad CLI usage).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Failure while executing an otherwise well-formed request (I/O, remote
// call, corrupt file).
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace semcom

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace rominv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad sizes, indices, nonpositive coefficients, malformed configs.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A linear solve or factorization failed (singular shift, collapsed basis, ...).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Explicit time stepping requested with a step above the stability bound.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double bound)
      : Error(what), max_step(bound) {}
  double max_step;
};

/// A rational model is not of Stieltjes type. `index` points at the first
/// offending pole, residue or coefficient (0-based), -1 if not applicable.
class InadmissibleModel : public Error {
 public:
  enum class Kind { degree, complex_pole, nonnegative_pole, residue, coefficient, breakdown };
  InadmissibleModel(const std::string& what, Kind k, int idx)
      : Error(what), kind(k), index(idx) {}
  Kind kind;
  int index;
};

}  // namespace rominv

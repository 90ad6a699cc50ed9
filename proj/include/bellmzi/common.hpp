#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bellmzi {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Numerical thresholds shared by every module. One instance, `kTolerances`,
/// holds the defaults; functions that need a different value take it explicitly.
struct Tolerances {
  double min_separation = 1e-6;      // displacements closer than this are degenerate
  double cholesky_residual = 1e-10;  // Frobenius bound on L L^H - (G + shift I)
  double involution = 1e-8;          // M^2 = I for observables
  double hermitian = 1e-12;
  double bound_slack = 1e-8;         // slack on classical / quantum bounds
  double degenerate_gap = 1e-10;     // top-two eigenvalue separation
  double eigen_residual = 1e-8;
  double fock_tail = 1e-12;          // discarded norm^2 allowed in Fock expansions
  double oracle_agreement = 1e-7;    // closed form vs Fock brute force
  double schmidt_zero = 1e-3;        // Schmidt coefficients below this count as zero
};

inline constexpr Tolerances kTolerances{};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gram matrix could not be factorized even after the diagonal shift.
class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace bellmzi

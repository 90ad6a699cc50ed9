#pragma once

#include <vector>

#include "bellmzi/coherent.hpp"

namespace bellmzi {

/// Raised when the two largest eigenvalues of S are closer than the
/// degeneracy gap. Both values are carried so the caller can report them.
class DegenerateTop : public Error {
 public:
  DegenerateTop(double top, double second);
  double top;
  double second;
};

struct ViolationEigenpair {
  int n = 0;
  double value = 0.0;      // largest eigenvalue of S
  double violation = 0.0;  // value - (2n - 2)
  CVector vector_orthonormal;
  CVector vector_coherent;     // empty until to_coherent_basis fills it
  std::vector<double> schmidt; // empty until schmidt_coefficients fills it
};

/// Top eigenpair of S. The eigenvector is rephased so that its
/// largest-magnitude entry (lowest index among ties) is real and positive;
/// for a real symmetric S the returned vector is real.
ViolationEigenpair max_eigenpair(const BccbOperator& op, const Tolerances& tol = kTolerances);

/// Coefficients c with (L^H (x) K^H) c = v, where L and K are the Cholesky
/// factors of the two parties. Row-major: c(i*n + j) multiplies |b_i>|g_j>.
CVector to_coherent_basis(const CVector& orthonormal, const CholeskyFactor& x_factor,
                          const CholeskyFactor& y_factor);

/// Inverse of to_coherent_basis.
CVector from_coherent_basis(const CVector& coherent, const CholeskyFactor& x_factor,
                            const CholeskyFactor& y_factor);

/// Reshape of a bipartite vector of size rows*cols into a rows x cols matrix,
/// X-index as row.
CMatrix reshape_bipartite(const CVector& v, Eigen::Index rows, Eigen::Index cols);

/// Singular values of the reshaped vector, normalized to unit square-sum and
/// sorted nonincreasing.
std::vector<double> schmidt_coefficients(const CVector& v, Eigen::Index rows, Eigen::Index cols);

/// Number of Schmidt coefficients at or above `zero`.
int schmidt_rank(const std::vector<double>& schmidt, double zero = kTolerances.schmidt_zero);

/// Full analysis of the maximal violation for given settings: eigenpair,
/// coherent-basis coefficients and Schmidt spectrum.
ViolationEigenpair analyze_settings(const DisplacementSequence& betas,
                                    const DisplacementSequence& gammas,
                                    const Tolerances& tol = kTolerances);

}  // namespace bellmzi

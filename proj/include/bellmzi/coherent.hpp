#pragma once

// Coherent-state overlap arithmetic and the finite matrix representation of
// displacement observables A(b) = I - 2|b><b|.
//
// A party's n displacements span an n-dimensional subspace. Its Gram matrix
// G_ij = <b_i|b_j> factors as G = L L^H; column i of L^H holds the
// coefficients of |b_i> in the orthonormal basis of that subspace, so
// A(b_i) = I - 2 (L^H e_i)(L^H e_i)^H.
//
// Two-party operators use the row-major Kronecker convention: index
// (i*n + k, j*n + l) pairs X-indices (i, j) with Y-indices (k, l).

#include <span>
#include <vector>

#include "bellmzi/common.hpp"

namespace bellmzi {

using Amplitude = Complex;

/// Ordered displacement amplitudes of one party. Requires at least two finite
/// entries. Separation is not enforced here: near-coincident entries are
/// handled by the regularized factorization, and the closed-form state
/// expectations accept repeated values.
class DisplacementSequence {
 public:
  DisplacementSequence() = default;
  explicit DisplacementSequence(std::vector<Amplitude> values);
  static DisplacementSequence real(std::span<const double> values);

  std::size_t size() const { return values_.size(); }
  const Amplitude& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Amplitude>& values() const { return values_; }
  std::vector<double> real_parts() const;

  bool is_real() const;
  /// Smallest |b_i - b_j| over i != j.
  double min_separation() const;
  bool is_separated(double delta = kTolerances.min_separation) const {
    return min_separation() >= delta;
  }

 private:
  std::vector<Amplitude> values_;
};

struct GramMatrix {
  CMatrix entries;
  double regularization_shift = 0.0;
};

struct CholeskyFactor {
  CMatrix lower;  // L, positive real diagonal
  double regularization_shift = 0.0;
};

struct ObservableSet {
  CholeskyFactor factor;
  std::vector<CMatrix> observables;
};

struct BccbOperator {
  CMatrix matrix;
  int n = 0;
  double classical_bound = 0.0;
  double quantum_bound = 0.0;
};

/// <x|y> = exp(-|x - y|^2 / 2 + i Im(conj(x) y)).
Complex overlap(Amplitude x, Amplitude y);

GramMatrix gram(const DisplacementSequence& seq);

/// Cholesky factorization with a single fallback: if the plain factorization
/// fails, the diagonal is shifted by 3 |lambda_min(G)| and the factorization
/// retried once. Throws FactorizationFailure if that also fails or the
/// reconstruction residual exceeds tolerance.
CholeskyFactor regularized_cholesky(const GramMatrix& g,
                                    const Tolerances& tol = kTolerances);

ObservableSet observables(const DisplacementSequence& seq,
                          const Tolerances& tol = kTolerances);

/// Sum_i X_i (x) Y_i + Sum_{i<n} X_{i+1} (x) Y_i - X_1 (x) Y_n for arbitrary
/// square observable lists of equal length.
CMatrix assemble_bccb(std::span<const CMatrix> xs, std::span<const CMatrix> ys);

BccbOperator bccb_operator(const DisplacementSequence& betas,
                           const DisplacementSequence& gammas,
                           const Tolerances& tol = kTolerances);

/// Largest eigenvalue of the BCCB operator. Uses a real symmetric solver when
/// both sequences are real. This is the optimizer's hot path.
double bccb_max_eigenvalue(const DisplacementSequence& betas,
                           const DisplacementSequence& gammas,
                           const Tolerances& tol = kTolerances);

double classical_bound(int n);
double quantum_bound(int n);

/// Largest eigenvalue of the 4x4 BCCB operator built from the Pauli-plane
/// observables with angles k pi / n and -k pi / n. Equals quantum_bound(n).
double pauli_reference_violation(int n);

}  // namespace bellmzi

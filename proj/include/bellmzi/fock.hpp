#pragma once

// Truncated Fock-space evaluation. Everything here is brute force on purpose:
// it is the independent reference against which the closed-form expectations
// and the Gram-matrix route are checked.

#include <span>

#include "bellmzi/coherent.hpp"

namespace bellmzi {

class TruncationTooSmall : public Error {
 public:
  using Error::Error;
};

/// Largest Fock dimension any constructor here will allocate.
inline constexpr int kMaxFockDimension = 512;

struct FockVector {
  CVector coefficients;
  double tail_bound = 0.0;  // discarded norm^2
};

/// coefficients(k, l) multiplies |k> (x) |l>.
struct TwoModeFockState {
  CMatrix coefficients;
  double tail_bound = 0.0;

  int dimension() const { return static_cast<int>(coefficients.rows()); }
  double norm2() const { return coefficients.squaredNorm(); }
};

/// Smallest dimension whose Poisson tail sum_{k>=N} e^{-m} m^k / k! is below
/// `tail` for mean photon number m = |alpha|^2.
int poisson_truncation(double mean, double tail = kTolerances.fock_tail);

/// sum_{k >= dimension} e^{-m} m^k / k!, evaluated by direct summation.
double poisson_tail(double mean, int dimension);

/// e^{-|alpha|^2/2} alpha^k / sqrt(k!) for k < dimension. Throws
/// TruncationTooSmall when the resulting tail exceeds `tail`.
FockVector coherent_fock(Amplitude alpha, int dimension, double tail = kTolerances.fock_tail);

/// Coherent expansion with the dimension picked by poisson_truncation.
FockVector coherent_fock(Amplitude alpha);

/// <psi| A(beta) (x) A(gamma) |psi>, with the identity term taken as <psi|psi>.
double expectation_brute(const TwoModeFockState& state, Amplitude beta, Amplitude gamma);

/// <psi| S |psi> assembled from expectation_brute over the chained terms.
double bccb_expectation_brute(const TwoModeFockState& state, const DisplacementSequence& betas,
                              const DisplacementSequence& gammas);

/// Diagonal of the phase-averaged projector onto |alpha>: Poisson weights
/// e^{-|alpha|^2} |alpha|^{2k} / k!.
RVector dephased_projector(Amplitude alpha, int dimension);

/// Same average by direct quadrature over `points` equally spaced phases.
/// Returns the full matrix so off-diagonal suppression can be checked.
CMatrix dephased_projector_quadrature(Amplitude alpha, int dimension, int points);

/// Expectation of the BCCB expression with every projector replaced by its
/// phase-averaged counterpart.
double dephased_bccb_value(const DisplacementSequence& betas, const DisplacementSequence& gammas,
                           const TwoModeFockState& state);

/// Value of the chained expression sum_i x_i y_i + sum_{i<n} x_{i+1} y_i - x_1 y_n
/// for given local correlator values.
double chained_form(std::span<const double> xs, std::span<const double> ys);

/// Maximum of chained_form over all deterministic +-1 assignments. n <= 10.
double lhv_maximum(int n);

/// Average of chained_form over the product distribution in which outcome
/// x_i = +1 with probability (1 + means_x[i]) / 2, computed by enumerating all
/// 2^(2n) deterministic strategies. n <= 10.
double lhv_mixture_value(std::span<const double> means_x, std::span<const double> means_y);

/// Two-mode state sum_ij c_ij |beta_i> (x) |gamma_j> expanded in the Fock basis.
TwoModeFockState coherent_superposition_fock(const CMatrix& coefficients,
                                             const DisplacementSequence& betas,
                                             const DisplacementSequence& gammas,
                                             double tail = kTolerances.fock_tail);

}  // namespace bellmzi

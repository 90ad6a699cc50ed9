#pragma once

// Closed-form BCCB expectations for two state families.
//
// Entangled coherent state  N (a |alpha>|0> + |0>|alpha>), alpha real.
// Two-mode squeezed vacuum  (1/cosh r) sum_k (-tanh r)^k |k>|k>.

#include "bellmzi/coherent.hpp"
#include "bellmzi/fock.hpp"

namespace bellmzi {

struct EcsParams {
  double alpha = 1.0;
  Complex a = 1.0;

  /// 1 / (1 + |a|^2 + 2 e^{-alpha^2} Re a); throws InvalidArgument when the
  /// denominator is not positive (the superposition cancels).
  double norm2() const;
};

inline constexpr double kMaxSqueezing = 3.0;

struct TmsvParams {
  double r = 0.0;  // 0 <= r <= kMaxSqueezing
  void validate() const;
};

/// <x| A(z) |y> = <x|y> - 2 <x|z><z|y>.
Complex displaced_matrix_element(Amplitude x, Amplitude y, Amplitude z);

/// <Psi_EC| A(beta) (x) A(gamma) |Psi_EC>.
double ecs_correlator(const EcsParams& p, Amplitude beta, Amplitude gamma);
double ecs_expectation(const EcsParams& p, const DisplacementSequence& betas,
                       const DisplacementSequence& gammas);

/// Maximum of <psi|S|psi> over the weight a (complex, including the a -> inf
/// limit) for fixed alpha and settings: the top generalized eigenvalue of the
/// 2x2 pencil on span{|alpha,0>, |0,alpha>}. Returns {value, a}.
struct EcsWeightOptimum {
  double value;
  Complex a;
};
EcsWeightOptimum ecs_best_weight(double alpha, const DisplacementSequence& betas,
                                 const DisplacementSequence& gammas);

/// <Psi_TMSV(r)| A(beta) (x) A(gamma) |Psi_TMSV(r)>.
double tmsv_correlator(double r, Amplitude beta, Amplitude gamma);
double tmsv_expectation(const TmsvParams& p, const DisplacementSequence& betas,
                        const DisplacementSequence& gammas);

/// Fock expansions. Dimension defaults to the smallest one meeting the tail
/// tolerance; TruncationTooSmall if that exceeds kMaxFockDimension.
TwoModeFockState ecs_state_fock(const EcsParams& p, int dimension = 0);
TwoModeFockState tmsv_state_fock(const TmsvParams& p, int dimension = 0);

}  // namespace bellmzi

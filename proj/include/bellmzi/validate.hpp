#pragma once

// Cross-checks used by `validate` and the acceptance suite.

#include <cstdint>

#include "bellmzi/coherent.hpp"
#include "bellmzi/optimize.hpp"

namespace bellmzi {

struct ClosedFormCheck {
  int samples = 0;
  double ecs_max_error = 0.0;      // |closed form - Fock brute force|
  double tmsv_max_error = 0.0;
  double overlap_max_error = 0.0;  // |<x|y> - Fock inner product|
  double gram_max_error = 0.0;     // Gram route vs Fock brute force on <S>

  bool passed(double expectation_tol = kTolerances.oracle_agreement,
              double overlap_tol = 1e-10) const {
    return ecs_max_error < expectation_tol && tmsv_max_error < expectation_tol &&
           overlap_max_error < overlap_tol && gram_max_error < overlap_tol;
  }
};

/// Random ECS samples (alpha <= 2, complex a and displacements) and TMSV
/// samples (r <= 1.5), chain lengths 2..4, each compared with the truncated
/// Fock brute force. The Gram check compares the top eigenvalue of S for
/// random settings with the Fock evaluation of its eigenvector.
ClosedFormCheck validate_closed_forms(int samples, std::uint64_t seed = 0);

struct DephasedCheck {
  int n = 0;
  double synchronized_value = 0.0;  // top eigenvalue of S
  double fock_value = 0.0;          // <S> of the eigenvector in the Fock basis
  double dephased_value = 0.0;      // same state, phase-averaged projectors
  double classical_bound = 0.0;

  bool violates() const { return fock_value > classical_bound; }
  bool classical(double slack = 1e-6) const { return dephased_value <= classical_bound + slack; }
};

/// Takes the optimal settings of a general run, expands the maximal
/// eigenvector in the Fock basis, and evaluates it with and without phase
/// averaging of the projectors.
DephasedCheck validate_dephased(const OptimizationRun& run);

/// Largest entrywise difference between dephased_projector and a
/// `points`-phase quadrature of |alpha><alpha|, over the full matrix.
double dephased_quadrature_error(Amplitude alpha, int dimension, int points);

}  // namespace bellmzi

#include "bellmzi/validate.hpp"

#include <algorithm>
#include <cmath>

#include "bellmzi/families.hpp"
#include "bellmzi/fock.hpp"
#include "bellmzi/rng.hpp"
#include "bellmzi/spectral.hpp"

namespace bellmzi {

namespace {

Amplitude random_amplitude(Rng& rng, double box) {
  return {rng.uniform(-box, box), rng.uniform(-box, box)};
}

DisplacementSequence random_sequence(Rng& rng, std::size_t n, double box) {
  std::vector<Amplitude> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(random_amplitude(rng, box));
  return DisplacementSequence(std::move(v));
}

double largest_mean(const DisplacementSequence& a, const DisplacementSequence& b, double extra) {
  double m = extra;
  for (const auto& x : a.values()) m = std::max(m, std::norm(x));
  for (const auto& x : b.values()) m = std::max(m, std::norm(x));
  return m;
}

}  // namespace

ClosedFormCheck validate_closed_forms(int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("samples must be >= 1");
  constexpr double kBox = 1.5;
  ClosedFormCheck out;
  out.samples = samples;
  for (int s = 0; s < samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    const auto n = static_cast<std::size_t>(2 + rng.next() % 3);
    const auto betas = random_sequence(rng, n, kBox);
    const auto gammas = random_sequence(rng, n, kBox);

    EcsParams ecs{rng.uniform(0.1, 2.0), random_amplitude(rng, 2.0)};
    if (1.0 + std::norm(ecs.a) + 2.0 * std::exp(-ecs.alpha * ecs.alpha) * ecs.a.real() < 1e-2)
      ecs.a = 1.0;
    const int ecs_dim = poisson_truncation(largest_mean(betas, gammas, ecs.alpha * ecs.alpha));
    const double ecs_oracle = bccb_expectation_brute(ecs_state_fock(ecs, ecs_dim), betas, gammas);
    out.ecs_max_error = std::max(out.ecs_max_error, std::abs(ecs_expectation(ecs, betas, gammas) - ecs_oracle));

    const TmsvParams tmsv{rng.uniform(0.0, 1.5)};
    const auto squeezed = tmsv_state_fock(tmsv);
    const int tmsv_dim =
        std::max(squeezed.dimension(), poisson_truncation(largest_mean(betas, gammas, 0.0)));
    const double tmsv_oracle = bccb_expectation_brute(tmsv_state_fock(tmsv, tmsv_dim), betas, gammas);
    out.tmsv_max_error =
        std::max(out.tmsv_max_error, std::abs(tmsv_expectation(tmsv, betas, gammas) - tmsv_oracle));

    const Amplitude x = random_amplitude(rng, 2.0), y = random_amplitude(rng, 2.0);
    const int dim = poisson_truncation(std::max(std::norm(x), std::norm(y)), 1e-20);
    const Complex fock_overlap =
        coherent_fock(x, dim, 1e-20).coefficients.dot(coherent_fock(y, dim, 1e-20).coefficients);
    out.overlap_max_error = std::max(out.overlap_max_error, std::abs(overlap(x, y) - fock_overlap));

    // Gram route: the top eigenvalue must equal the Fock evaluation of the
    // eigenvector rebuilt from coherent-basis coefficients.
    const auto pair = analyze_settings(betas, gammas);
    const CMatrix c = reshape_bipartite(pair.vector_coherent, static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(n));
    const auto state = coherent_superposition_fock(c, betas, gammas, 1e-20);
    out.gram_max_error =
        std::max(out.gram_max_error, std::abs(bccb_expectation_brute(state, betas, gammas) - pair.value));
  }
  return out;
}

DephasedCheck validate_dephased(const OptimizationRun& run) {
  if (run.kind != Kind::general) throw InvalidArgument("dephasing check needs a general run");
  if (run.failure) throw InvalidArgument("run failed: " + *run.failure);
  const auto betas = DisplacementSequence::real(run.settings.betas);
  const auto gammas = DisplacementSequence::real(run.settings.gammas);
  const auto pair = analyze_settings(betas, gammas);
  const auto n = static_cast<Eigen::Index>(betas.size());
  const auto state = coherent_superposition_fock(reshape_bipartite(pair.vector_coherent, n, n), betas, gammas);
  DephasedCheck out;
  out.n = run.n;
  out.synchronized_value = pair.value;
  out.fock_value = bccb_expectation_brute(state, betas, gammas);
  out.dephased_value = dephased_bccb_value(betas, gammas, state);
  out.classical_bound = classical_bound(run.n);
  return out;
}

double dephased_quadrature_error(Amplitude alpha, int dimension, int points) {
  const CMatrix quad = dephased_projector_quadrature(alpha, dimension, points);
  const RVector diag = dephased_projector(alpha, dimension);
  CMatrix expected = CMatrix::Zero(dimension, dimension);
  expected.diagonal() = diag.cast<Complex>();
  return (quad - expected).cwiseAbs().maxCoeff();
}

}  // namespace bellmzi

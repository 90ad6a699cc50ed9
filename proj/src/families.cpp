#include "bellmzi/families.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace bellmzi {

double EcsParams::norm2() const {
  const double denom = 1.0 + std::norm(a) + 2.0 * std::exp(-alpha * alpha) * a.real();
  if (!(denom > 0.0) || !std::isfinite(denom))
    throw InvalidArgument("entangled coherent state has zero norm for alpha=" +
                          std::to_string(alpha));
  return 1.0 / denom;
}

void TmsvParams::validate() const {
  if (!(r >= 0.0) || r > kMaxSqueezing)
    throw InvalidArgument("squeezing parameter r=" + std::to_string(r) + " outside [0, 3]");
}

Complex displaced_matrix_element(Amplitude x, Amplitude y, Amplitude z) {
  return overlap(x, y) - 2.0 * overlap(x, z) * overlap(z, y);
}

// Expanding |Psi> = N (a |alpha,0> + |0,alpha>):
//   N^2 [ |a|^2 b(al,al,beta) b(0,0,gamma) + b(0,0,beta) b(al,al,gamma)
//         + 2 Re( conj(a) b(al,0,beta) b(0,al,gamma) ) ].
// The b(0,0,.) b(al,al,.) term is a diagonal contribution with weight 1; it
// does not belong inside the Re(.) with a factor of two.
double ecs_correlator(const EcsParams& p, Amplitude beta, Amplitude gamma) {
  const Complex al(p.alpha, 0.0);
  const Complex zero(0.0, 0.0);
  const double diag_a = (displaced_matrix_element(al, al, beta) *
                         displaced_matrix_element(zero, zero, gamma)).real();
  const double diag_b = (displaced_matrix_element(zero, zero, beta) *
                         displaced_matrix_element(al, al, gamma)).real();
  const Complex cross = std::conj(p.a) * displaced_matrix_element(al, zero, beta) *
                        displaced_matrix_element(zero, al, gamma);
  return p.norm2() * (std::norm(p.a) * diag_a + diag_b + 2.0 * cross.real());
}

namespace {

template <typename Correlator>
double chained_sum(const DisplacementSequence& betas, const DisplacementSequence& gammas,
                   Correlator&& corr) {
  const std::size_t n = betas.size();
  if (gammas.size() != n) throw LengthMismatch("beta and gamma sequences differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += corr(betas[i], gammas[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) total += corr(betas[i + 1], gammas[i]);
  return total - corr(betas[0], gammas[n - 1]);
}

}  // namespace

double ecs_expectation(const EcsParams& p, const DisplacementSequence& betas,
                       const DisplacementSequence& gammas) {
  return chained_sum(betas, gammas,
                     [&](Amplitude b, Amplitude g) { return ecs_correlator(p, b, g); });
}

EcsWeightOptimum ecs_best_weight(double alpha, const DisplacementSequence& betas,
                                 const DisplacementSequence& gammas) {
  if (alpha == 0.0) throw InvalidArgument("ecs_best_weight needs alpha != 0");
  const std::array<std::pair<Complex, Complex>, 2> basis{
      std::pair{Complex(alpha, 0.0), Complex(0.0, 0.0)},
      std::pair{Complex(0.0, 0.0), Complex(alpha, 0.0)}};
  Eigen::Matrix2cd m, g;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      const auto [xp, yp] = basis[static_cast<std::size_t>(p)];
      const auto [xq, yq] = basis[static_cast<std::size_t>(q)];
      g(p, q) = overlap(xp, xq) * overlap(yp, yq);
      m(p, q) = Complex(0.0, 0.0);
      const std::size_t n = betas.size();
      auto add = [&](std::size_t i, std::size_t j, double sign) {
        m(p, q) += sign * displaced_matrix_element(xp, xq, betas[i]) *
                   displaced_matrix_element(yp, yq, gammas[j]);
      };
      for (std::size_t i = 0; i < n; ++i) add(i, i, 1.0);
      for (std::size_t i = 0; i + 1 < n; ++i) add(i + 1, i, 1.0);
      add(0, n - 1, -1.0);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2cd> eig(m, g);
  const Eigen::Vector2cd w = eig.eigenvectors().col(1);
  const Complex a = std::abs(w(1)) > 0.0 ? w(0) / w(1) : Complex(INFINITY, 0.0);
  return {eig.eigenvalues()(1), a};
}

double tmsv_correlator(double r, Amplitude beta, Amplitude gamma) {
  const double ch2 = std::cosh(r) * std::cosh(r);
  const double nb = std::norm(beta), ng = std::norm(gamma);
  const double joint = std::exp(-nb - ng - 2.0 * (beta * gamma).real() * std::tanh(r));
  return 1.0 - 2.0 * (std::exp(-nb / ch2) + std::exp(-ng / ch2) - 2.0 * joint) / ch2;
}

double tmsv_expectation(const TmsvParams& p, const DisplacementSequence& betas,
                        const DisplacementSequence& gammas) {
  p.validate();
  return chained_sum(betas, gammas,
                     [&](Amplitude b, Amplitude g) { return tmsv_correlator(p.r, b, g); });
}

TwoModeFockState ecs_state_fock(const EcsParams& p, int dimension) {
  const double n2 = p.norm2();
  if (dimension <= 0) dimension = poisson_truncation(p.alpha * p.alpha);
  const FockVector coh = coherent_fock(Complex(p.alpha, 0.0), dimension);
  CVector vac = CVector::Zero(dimension);
  vac(0) = 1.0;
  TwoModeFockState out;
  out.coefficients = std::sqrt(n2) * (p.a * coh.coefficients * vac.transpose() +
                                      vac * coh.coefficients.transpose());
  out.tail_bound = std::abs(1.0 - out.norm2());
  return out;
}

TwoModeFockState tmsv_state_fock(const TmsvParams& p, int dimension) {
  p.validate();
  const double t = std::tanh(p.r);
  const double t2 = t * t;
  if (dimension <= 0) {
    if (t2 == 0.0) {
      dimension = 1;
    } else {
      const double needed = std::ceil(std::log(kTolerances.fock_tail) / std::log(t2));
      if (needed > kMaxFockDimension)
        throw TruncationTooSmall("squeezing r=" + std::to_string(p.r) + " needs " +
                                 std::to_string(static_cast<long>(needed)) + " Fock states");
      dimension = std::max(1, static_cast<int>(needed));
    }
  }
  if (dimension > kMaxFockDimension)
    throw TruncationTooSmall("Fock dimension above " + std::to_string(kMaxFockDimension));
  TwoModeFockState out{CMatrix::Zero(dimension, dimension), std::pow(t2, dimension)};
  double c = 1.0 / std::cosh(p.r);
  for (int k = 0; k < dimension; ++k) {
    out.coefficients(k, k) = c;
    c *= -t;
  }
  return out;
}

}  // namespace bellmzi

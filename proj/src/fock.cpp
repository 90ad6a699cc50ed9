#include "bellmzi/fock.hpp"

#include <cmath>
#include <numbers>

namespace bellmzi {

namespace {

void check_dimension(int dimension) {
  if (dimension < 1 || dimension > kMaxFockDimension)
    throw TruncationTooSmall("Fock dimension " + std::to_string(dimension) +
                             " outside [1, " + std::to_string(kMaxFockDimension) + "]");
}

std::vector<double> chain_values(const RMatrix& per_setting, Eigen::Index column) {
  std::vector<double> out(static_cast<std::size_t>(per_setting.rows()));
  for (Eigen::Index i = 0; i < per_setting.rows(); ++i)
    out[static_cast<std::size_t>(i)] = per_setting(i, column);
  return out;
}

}  // namespace

double poisson_tail(double mean, int dimension) {
  if (mean < 0.0) throw InvalidArgument("Poisson mean must be nonnegative");
  if (dimension <= 0) return 1.0;
  if (mean == 0.0) return 0.0;
  // First discarded term, then the ratio recursion m / (k + 1).
  double term = std::exp(-mean + dimension * std::log(mean) - std::lgamma(dimension + 1.0));
  double sum = 0.0;
  for (int k = dimension; term > 0.0; ++k) {
    sum += term;
    term *= mean / (k + 1.0);
    if (k + 1.0 > mean && term < sum * 1e-17) break;
  }
  return sum;
}

int poisson_truncation(double mean, double tail) {
  for (int n = 1; n <= kMaxFockDimension; ++n)
    if (poisson_tail(mean, n) < tail) return n;
  throw TruncationTooSmall("mean photon number " + std::to_string(mean) +
                           " needs more than " + std::to_string(kMaxFockDimension) +
                           " Fock states for tail " + std::to_string(tail));
}

FockVector coherent_fock(Amplitude alpha, int dimension, double tail) {
  check_dimension(dimension);
  const double mean = std::norm(alpha);
  const double discarded = poisson_tail(mean, dimension);
  if (discarded >= tail)
    throw TruncationTooSmall("dimension " + std::to_string(dimension) +
                             " leaves tail " + std::to_string(discarded) + " for |alpha|^2 = " +
                             std::to_string(mean));
  FockVector out{CVector(dimension), discarded};
  Complex c = std::exp(-0.5 * mean);
  for (int k = 0; k < dimension; ++k) {
    out.coefficients(k) = c;
    c *= alpha / std::sqrt(k + 1.0);
  }
  return out;
}

FockVector coherent_fock(Amplitude alpha) {
  return coherent_fock(alpha, poisson_truncation(std::norm(alpha)));
}

double expectation_brute(const TwoModeFockState& state, Amplitude beta, Amplitude gamma) {
  const int dim = state.dimension();
  const CVector u = coherent_fock(beta, dim).coefficients.conjugate();
  const CVector v = coherent_fock(gamma, dim).coefficients.conjugate();
  const auto& c = state.coefficients;
  const double p_beta = (u.transpose() * c).squaredNorm();
  const double p_gamma = (c * v).squaredNorm();
  const double p_both = std::norm((u.transpose() * c * v)(0, 0));
  return state.norm2() - 2.0 * p_beta - 2.0 * p_gamma + 4.0 * p_both;
}

double bccb_expectation_brute(const TwoModeFockState& state, const DisplacementSequence& betas,
                              const DisplacementSequence& gammas) {
  const std::size_t n = betas.size();
  if (gammas.size() != n) throw LengthMismatch("beta and gamma sequences differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += expectation_brute(state, betas[i], gammas[i]);
  for (std::size_t i = 0; i + 1 < n; ++i)
    total += expectation_brute(state, betas[i + 1], gammas[i]);
  total -= expectation_brute(state, betas[0], gammas[n - 1]);
  return total;
}

RVector dephased_projector(Amplitude alpha, int dimension) {
  check_dimension(dimension);
  const double mean = std::norm(alpha);
  RVector w(dimension);
  double term = std::exp(-mean);
  for (int k = 0; k < dimension; ++k) {
    w(k) = term;
    term *= mean / (k + 1.0);
  }
  return w;
}

CMatrix dephased_projector_quadrature(Amplitude alpha, int dimension, int points) {
  check_dimension(dimension);
  if (points < 1) throw InvalidArgument("quadrature needs at least one point");
  // The coherent vector may be truncated harder than the default tail here;
  // the comparison is entrywise on the retained block.
  CMatrix acc = CMatrix::Zero(dimension, dimension);
  for (int p = 0; p < points; ++p) {
    const double phi = 2.0 * std::numbers::pi * p / points;
    const Complex rotated = alpha * std::polar(1.0, phi);
    const CVector v = coherent_fock(rotated, dimension, 1.0).coefficients;
    acc += v * v.adjoint();
  }
  return acc / static_cast<double>(points);
}

double chained_form(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) throw LengthMismatch("chained form needs equal lengths >= 2");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += xs[i] * ys[i];
  for (std::size_t i = 0; i + 1 < n; ++i) total += xs[i + 1] * ys[i];
  return total - xs[0] * ys[n - 1];
}

double lhv_maximum(int n) {
  if (n < 2 || n > 10) throw InvalidArgument("LHV enumeration supports 2 <= n <= 10");
  double best = -1e300;
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (unsigned a = 0; a < (1u << n); ++a)
    for (unsigned b = 0; b < (1u << n); ++b) {
      for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = (a >> i) & 1u ? 1.0 : -1.0;
        ys[static_cast<std::size_t>(i)] = (b >> i) & 1u ? 1.0 : -1.0;
      }
      best = std::max(best, chained_form(xs, ys));
    }
  return best;
}

double lhv_mixture_value(std::span<const double> means_x, std::span<const double> means_y) {
  const int n = static_cast<int>(means_x.size());
  if (n < 2 || n > 10 || static_cast<int>(means_y.size()) != n)
    throw InvalidArgument("LHV enumeration supports 2 <= n <= 10 with equal lengths");
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  double total = 0.0;
  for (unsigned a = 0; a < (1u << n); ++a) {
    double wa = 1.0;
    for (int i = 0; i < n; ++i) {
      const double s = (a >> i) & 1u ? 1.0 : -1.0;
      xs[static_cast<std::size_t>(i)] = s;
      wa *= 0.5 * (1.0 + s * means_x[static_cast<std::size_t>(i)]);
    }
    for (unsigned b = 0; b < (1u << n); ++b) {
      double wb = 1.0;
      for (int i = 0; i < n; ++i) {
        const double s = (b >> i) & 1u ? 1.0 : -1.0;
        ys[static_cast<std::size_t>(i)] = s;
        wb *= 0.5 * (1.0 + s * means_y[static_cast<std::size_t>(i)]);
      }
      total += wa * wb * chained_form(xs, ys);
    }
  }
  return total;
}

double dephased_bccb_value(const DisplacementSequence& betas, const DisplacementSequence& gammas,
                           const TwoModeFockState& state) {
  const auto n = static_cast<Eigen::Index>(betas.size());
  if (static_cast<Eigen::Index>(gammas.size()) != n)
    throw LengthMismatch("beta and gamma sequences differ in length");
  const int dim = state.dimension();
  // Local correlator of setting i on Fock level k: 1 - 2 w_i(k).
  RMatrix xs(n, dim), ys(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    xs.row(i) = (1.0 - 2.0 * dephased_projector(betas[static_cast<std::size_t>(i)], dim).array())
                    .transpose();
    ys.row(i) = (1.0 - 2.0 * dephased_projector(gammas[static_cast<std::size_t>(i)], dim).array())
                    .transpose();
  }
  const RMatrix probs = state.coefficients.cwiseAbs2();
  double total = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const auto x = chain_values(xs, k);
    for (Eigen::Index l = 0; l < dim; ++l) {
      if (probs(k, l) == 0.0) continue;
      total += probs(k, l) * chained_form(x, chain_values(ys, l));
    }
  }
  return total;
}

TwoModeFockState coherent_superposition_fock(const CMatrix& coefficients,
                                             const DisplacementSequence& betas,
                                             const DisplacementSequence& gammas, double tail) {
  const auto nx = static_cast<Eigen::Index>(betas.size());
  const auto ny = static_cast<Eigen::Index>(gammas.size());
  if (coefficients.rows() != nx || coefficients.cols() != ny)
    throw LengthMismatch("coefficient matrix shape does not match the displacement sequences");
  double largest = 0.0;
  for (const auto& b : betas.values()) largest = std::max(largest, std::norm(b));
  for (const auto& g : gammas.values()) largest = std::max(largest, std::norm(g));
  const int dim = poisson_truncation(largest, tail);
  CMatrix u(dim, nx), v(dim, ny);
  for (Eigen::Index i = 0; i < nx; ++i)
    u.col(i) = coherent_fock(betas[static_cast<std::size_t>(i)], dim, tail).coefficients;
  for (Eigen::Index j = 0; j < ny; ++j)
    v.col(j) = coherent_fock(gammas[static_cast<std::size_t>(j)], dim, tail).coefficients;
  TwoModeFockState out{u * coefficients * v.transpose(), 0.0};
  // Exact norm from the Gram matrices; the difference is the truncated weight.
  const CMatrix gx = gram(betas).entries;
  const CMatrix gy = gram(gammas).entries;
  const double exact = (coefficients.adjoint() * gx * coefficients * gy.transpose()).trace().real();
  out.tail_bound = std::abs(exact - out.norm2());
  return out;
}

}  // namespace bellmzi

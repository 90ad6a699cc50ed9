#include "bellmzi/coherent.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <Eigen/Eigenvalues>

namespace bellmzi {

namespace {

template <typename Matrix>
Matrix kron(const Matrix& a, const Matrix& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols();
  const Eigen::Index rb = b.rows(), cb = b.cols();
  Matrix out(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < ca; ++j)
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

// X_i (x) Y_i + X_{i+1} (x) Y_i = (X_i + X_{i+1}) (x) Y_i for i < n, and the
// last setting contributes (X_n - X_1) (x) Y_n.
template <typename Matrix>
Matrix assemble(std::span<const Matrix> xs, std::span<const Matrix> ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n)
    throw LengthMismatch("BCCB assembly needs two observable lists of equal length >= 2");
  const Eigen::Index dx = xs[0].rows(), dy = ys[0].rows();
  Matrix out = Matrix::Zero(dx * dy, dx * dy);
  for (std::size_t i = 0; i + 1 < n; ++i) out += kron<Matrix>(xs[i] + xs[i + 1], ys[i]);
  out += kron<Matrix>(xs[n - 1] - xs[0], ys[n - 1]);
  return out;
}

template <typename Matrix>
Matrix gram_of(const DisplacementSequence& seq) {
  const Eigen::Index n = static_cast<Eigen::Index>(seq.size());
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if constexpr (std::is_same_v<typename Matrix::Scalar, double>)
        g(i, j) = overlap(seq[i], seq[j]).real();
      else
        g(i, j) = overlap(seq[i], seq[j]);
    }
  return g;
}

template <typename Matrix>
std::pair<Matrix, double> factorize(const Matrix& g, const Tolerances& tol) {
  const Eigen::Index n = g.rows();
  auto attempt = [&](double shift) -> std::optional<Matrix> {
    Matrix shifted = g;
    shifted.diagonal().array() += shift;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Matrix lower = llt.matrixL();
    if (!lower.allFinite()) return std::nullopt;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(std::real(lower(i, i)) > 0.0)) return std::nullopt;
    const double residual = (lower * lower.adjoint() - shifted).norm();
    if (residual > tol.cholesky_residual) return std::nullopt;
    return lower;
  };

  if (auto plain = attempt(0.0)) return {std::move(*plain), 0.0};

  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues()(0);
  const double shift = 3.0 * std::abs(smallest);
  if (shift > 0.0 && std::isfinite(shift)) {
    if (auto shifted = attempt(shift)) return {std::move(*shifted), shift};
  }
  throw FactorizationFailure("Gram matrix is not positive definite after a diagonal shift of " +
                             std::to_string(shift) + "; displacements are too close");
}

template <typename Matrix>
std::vector<Matrix> observables_from(const Matrix& lower) {
  const Eigen::Index n = lower.rows();
  const Matrix upper = lower.adjoint();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto col = upper.col(i);
    out.push_back(Matrix::Identity(n, n) - 2.0 * col * col.adjoint());
  }
  return out;
}

}  // namespace

DisplacementSequence::DisplacementSequence(std::vector<Amplitude> values)
    : values_(std::move(values)) {
  if (values_.size() < 2)
    throw InvalidArgument("a displacement sequence needs at least two settings");
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("displacement amplitudes must be finite");
}

DisplacementSequence DisplacementSequence::real(std::span<const double> values) {
  return DisplacementSequence(std::vector<Amplitude>(values.begin(), values.end()));
}

std::vector<double> DisplacementSequence::real_parts() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(v.real());
  return out;
}

bool DisplacementSequence::is_real() const {
  for (const auto& v : values_)
    if (v.imag() != 0.0) return false;
  return true;
}

double DisplacementSequence::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values_.size(); ++i)
    for (std::size_t j = i + 1; j < values_.size(); ++j)
      best = std::min(best, std::abs(values_[i] - values_[j]));
  return best;
}

Complex overlap(Amplitude x, Amplitude y) {
  const double dist2 = std::norm(x - y);
  const double phase = (std::conj(x) * y).imag();
  return std::exp(Complex(-0.5 * dist2, phase));
}

GramMatrix gram(const DisplacementSequence& seq) {
  return GramMatrix{gram_of<CMatrix>(seq), 0.0};
}

CholeskyFactor regularized_cholesky(const GramMatrix& g, const Tolerances& tol) {
  // Real Gram matrices take the same real factorization as bccb_max_eigenvalue,
  // so near-singular optima seen by the optimizer can still be analyzed.
  if (g.entries.imag().isZero(0.0)) {
    auto [lower, shift] = factorize<RMatrix>(g.entries.real(), tol);
    return CholeskyFactor{lower.cast<Complex>(), shift};
  }
  auto [lower, shift] = factorize<CMatrix>(g.entries, tol);
  return CholeskyFactor{std::move(lower), shift};
}

ObservableSet observables(const DisplacementSequence& seq, const Tolerances& tol) {
  CholeskyFactor factor = regularized_cholesky(gram(seq), tol);
  auto obs = observables_from<CMatrix>(factor.lower);
  return ObservableSet{std::move(factor), std::move(obs)};
}

CMatrix assemble_bccb(std::span<const CMatrix> xs, std::span<const CMatrix> ys) {
  return assemble<CMatrix>(xs, ys);
}

BccbOperator bccb_operator(const DisplacementSequence& betas,
                           const DisplacementSequence& gammas, const Tolerances& tol) {
  if (betas.size() != gammas.size())
    throw LengthMismatch("beta and gamma sequences differ in length: " +
                         std::to_string(betas.size()) + " vs " + std::to_string(gammas.size()));
  const auto xs = observables(betas, tol);
  const auto ys = observables(gammas, tol);
  const int n = static_cast<int>(betas.size());
  return BccbOperator{assemble<CMatrix>(xs.observables, ys.observables), n, classical_bound(n),
                      quantum_bound(n)};
}

double bccb_max_eigenvalue(const DisplacementSequence& betas,
                           const DisplacementSequence& gammas, const Tolerances& tol) {
  if (betas.size() != gammas.size())
    throw LengthMismatch("beta and gamma sequences differ in length");
  if (betas.is_real() && gammas.is_real()) {
    const auto lx = factorize<RMatrix>(gram_of<RMatrix>(betas), tol).first;
    const auto ly = factorize<RMatrix>(gram_of<RMatrix>(gammas), tol).first;
    const auto xs = observables_from<RMatrix>(lx);
    const auto ys = observables_from<RMatrix>(ly);
    const RMatrix s = assemble<RMatrix>(xs, ys);
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(s, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(eig.eigenvalues().size() - 1);
  }
  const auto op = bccb_operator(betas, gammas, tol);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(op.matrix, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(eig.eigenvalues().size() - 1);
}

double classical_bound(int n) { return 2.0 * n - 2.0; }

double quantum_bound(int n) { return 2.0 * n * std::cos(std::numbers::pi / (2.0 * n)); }

double pauli_reference_violation(int n) {
  if (n < 2) throw InvalidArgument("pauli_reference_violation needs n >= 2");
  auto pauli_plane = [](double angle) {
    CMatrix m(2, 2);
    m << 0.0, std::polar(1.0, -angle), std::polar(1.0, angle), 0.0;
    return m;
  };
  std::vector<CMatrix> xs, ys;
  for (int k = 1; k <= n; ++k) {
    xs.push_back(pauli_plane(k * std::numbers::pi / n));
    ys.push_back(pauli_plane(-k * std::numbers::pi / n));
  }
  const CMatrix s = assemble<CMatrix>(xs, ys);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(3);
}

}  // namespace bellmzi

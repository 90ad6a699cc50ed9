#include "bellmzi/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bellmzi {

DegenerateTop::DegenerateTop(double top_value, double second_value)
    : Error("top eigenvalue of S is degenerate: " + std::to_string(top_value) + " and " +
            std::to_string(second_value)),
      top(top_value),
      second(second_value) {}

ViolationEigenpair max_eigenpair(const BccbOperator& op, const Tolerances& tol) {
  const Eigen::Index dim = op.matrix.rows();
  ViolationEigenpair out;
  out.n = op.n;
  if (op.matrix.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(op.matrix.real());
    const auto& w = eig.eigenvalues();
    if (dim > 1 && w(dim - 1) - w(dim - 2) < tol.degenerate_gap)
      throw DegenerateTop(w(dim - 1), w(dim - 2));
    out.value = w(dim - 1);
    out.vector_orthonormal = eig.eigenvectors().col(dim - 1).cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(op.matrix);
    const auto& w = eig.eigenvalues();
    if (dim > 1 && w(dim - 1) - w(dim - 2) < tol.degenerate_gap)
      throw DegenerateTop(w(dim - 1), w(dim - 2));
    out.value = w(dim - 1);
    out.vector_orthonormal = eig.eigenvectors().col(dim - 1);
  }
  out.violation = out.value - op.classical_bound;

  auto& v = out.vector_orthonormal;
  v.normalize();
  const double largest = v.cwiseAbs().maxCoeff();
  Eigen::Index pivot = 0;
  while (std::abs(v(pivot)) < largest * (1.0 - 1e-9)) ++pivot;
  const Complex phase = v(pivot) / std::abs(v(pivot));
  v *= std::conj(phase);
  v(pivot) = Complex(v(pivot).real(), 0.0);
  return out;
}

CMatrix reshape_bipartite(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw LengthMismatch("vector size does not match reshape");
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

namespace {

CVector flatten(const CMatrix& m) {
  CVector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

}  // namespace

// (L^H (x) K^H) vec(C) = vec(L^H C conj(K)) in row-major vectorization.
CVector to_coherent_basis(const CVector& orthonormal, const CholeskyFactor& x_factor,
                          const CholeskyFactor& y_factor) {
  const Eigen::Index nx = x_factor.lower.rows(), ny = y_factor.lower.rows();
  const CMatrix v = reshape_bipartite(orthonormal, nx, ny);
  // L^H W = V gives W = C conj(K); then K^H C^T = W^T.
  const CMatrix lh = x_factor.lower.adjoint();
  const CMatrix w = lh.triangularView<Eigen::Upper>().solve(v);
  const CMatrix kh = y_factor.lower.adjoint();
  const CMatrix ct = kh.triangularView<Eigen::Upper>().solve(w.transpose());
  return flatten(ct.transpose());
}

CVector from_coherent_basis(const CVector& coherent, const CholeskyFactor& x_factor,
                            const CholeskyFactor& y_factor) {
  const Eigen::Index nx = x_factor.lower.rows(), ny = y_factor.lower.rows();
  const CMatrix c = reshape_bipartite(coherent, nx, ny);
  return flatten(x_factor.lower.adjoint() * c * y_factor.lower.conjugate());
}

std::vector<double> schmidt_coefficients(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  const CMatrix m = reshape_bipartite(v, rows, cols);
  Eigen::JacobiSVD<CMatrix> svd(m);
  RVector s = svd.singularValues();
  const double norm = s.norm();
  if (norm > 0.0) s /= norm;
  std::vector<double> out(s.data(), s.data() + s.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

int schmidt_rank(const std::vector<double>& schmidt, double zero) {
  return static_cast<int>(
      std::count_if(schmidt.begin(), schmidt.end(), [zero](double s) { return s >= zero; }));
}

ViolationEigenpair analyze_settings(const DisplacementSequence& betas,
                                    const DisplacementSequence& gammas, const Tolerances& tol) {
  const auto op = bccb_operator(betas, gammas, tol);
  auto pair = max_eigenpair(op, tol);
  const auto lx = regularized_cholesky(gram(betas), tol);
  const auto ly = regularized_cholesky(gram(gammas), tol);
  pair.vector_coherent = to_coherent_basis(pair.vector_orthonormal, lx, ly);
  pair.schmidt = schmidt_coefficients(pair.vector_orthonormal, op.n, op.n);
  return pair;
}

}  // namespace bellmzi

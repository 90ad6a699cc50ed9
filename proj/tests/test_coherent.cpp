#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bellmzi/coherent.hpp"
#include "bellmzi/rng.hpp"

using namespace bellmzi;

namespace {

DisplacementSequence real_seq(std::vector<double> v) { return DisplacementSequence::real(v); }

DisplacementSequence random_seq(Rng& rng, int n, double box, bool complex) {
  std::vector<Amplitude> v;
  for (int i = 0; i < n; ++i) v.emplace_back(rng.uniform(-box, box), complex ? rng.uniform(-box, box) : 0.0);
  return DisplacementSequence(v);
}

}  // namespace

TEST_CASE("overlap") {
  CHECK(std::abs(overlap(0.0, 0.0) - 1.0) < 1e-15);
  const double d = std::sqrt(std::log(2.0));
  CHECK(std::abs(overlap(0.0, d) - std::exp(-d * d / 2)) < 1e-15);
  CHECK(std::abs(std::abs(overlap(0.0, d)) - 1 / std::numbers::sqrt2) < 1e-15);

  Rng rng(3);
  for (int k = 0; k < 10; ++k) {
    const Amplitude x(rng.uniform(-2, 2), rng.uniform(-2, 2)), y(rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(std::abs(overlap(x, y) - std::conj(overlap(y, x))) < 1e-15);
    CHECK(std::abs(overlap(x, y)) == doctest::Approx(std::exp(-std::norm(x - y) / 2)).epsilon(1e-13));
  }
}

TEST_CASE("gram and cholesky") {
  const double d = 0.7, c = std::exp(-d * d / 2);
  const auto g = gram(real_seq({0.0, d}));
  CHECK(std::abs(g.entries(0, 1) - c) < 1e-15);
  CHECK(std::abs(g.entries(1, 0) - c) < 1e-15);
  CHECK(g.regularization_shift == 0.0);

  const auto l = regularized_cholesky(g);
  CHECK(l.regularization_shift == 0.0);
  CHECK(std::abs(l.lower(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(l.lower(0, 1)) < 1e-14);
  CHECK(std::abs(l.lower(1, 0) - c) < 1e-14);
  CHECK(std::abs(l.lower(1, 1) - std::sqrt(1 - c * c)) < 1e-14);

  SUBCASE("far separated gives identity") {
    const auto f = regularized_cholesky(gram(real_seq({0.0, 10.0, 20.0})));
    CHECK((f.lower - CMatrix::Identity(3, 3)).norm() < 1e-12);
    CHECK(f.regularization_shift == 0.0);
  }

  SUBCASE("random sequences are positive definite") {
    Rng rng(11);
    for (int k = 0; k < 20; ++k) {
      const auto seq = random_seq(rng, 5, 2.0, true);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(gram(seq).entries);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      const auto f = regularized_cholesky(gram(seq));
      CHECK((f.lower * f.lower.adjoint() - gram(seq).entries).norm() < 1e-10);
      for (int i = 0; i < 5; ++i) CHECK(f.lower(i, i).real() > 0.0);
    }
  }

  SUBCASE("near-coincident displacements never give a silent wrong factor") {
    const auto g2 = gram(real_seq({0.0, 1e-9, 1.0}));
    try {
      const auto f = regularized_cholesky(g2);
      CHECK(f.regularization_shift > 0.0);
      const CMatrix shifted = g2.entries + f.regularization_shift * CMatrix::Identity(3, 3);
      CHECK((f.lower * f.lower.adjoint() - shifted).norm() < 1e-10);
    } catch (const FactorizationFailure&) {
      CHECK(true);
    }
  }
}

TEST_CASE("observables") {
  const double d = std::sqrt(std::log(2.0));
  const auto set = observables(real_seq({0.0, d}));
  REQUIRE(set.observables.size() == 2);
  const CMatrix id = CMatrix::Identity(2, 2);
  for (const auto& x : set.observables) {
    CHECK((x * x - id).norm() < 1e-8);
    CHECK((x - x.adjoint()).norm() < 1e-12);
    CHECK(std::abs(x.trace()) < 1e-12);
  }
  // X_i = I - 2 f_i f_i^H with |f_1^H f_2|^2 = |<b1|b2>|^2, so tr(X1 X2) = -2 + 4|<b1|b2>|^2.
  const auto& x1 = set.observables[0];
  const auto& x2 = set.observables[1];
  const double ov2 = std::norm(overlap(0.0, d));
  CHECK(std::abs((x1 * x2 + x2 * x1).trace().real() / 2 - (-2 + 4 * ov2)) < 1e-12);

  SUBCASE("far separated observables commute") {
    const auto far = observables(real_seq({0.0, 8.0, 16.0, 24.0}));
    for (const auto& a : far.observables)
      for (const auto& b : far.observables) CHECK((a * b - b * a).norm() < 1e-10);
  }
}

TEST_CASE("bounds") {
  CHECK(classical_bound(2) == 2.0);
  CHECK(quantum_bound(2) == doctest::Approx(2 * std::numbers::sqrt2).epsilon(1e-15));
  CHECK(classical_bound(3) == 4.0);
  CHECK(quantum_bound(3) == doctest::Approx(3 * std::sqrt(3.0)).epsilon(1e-15));
  for (int n = 2; n <= 50; ++n) CHECK(quantum_bound(n) - classical_bound(n) > 0.0);
}

TEST_CASE("pauli reference") {
  CHECK(std::abs(pauli_reference_violation(2) - 2 * std::numbers::sqrt2) < 1e-9);
  CHECK(std::abs(pauli_reference_violation(3) - 3 * std::sqrt(3.0)) < 1e-9);
  CHECK(std::abs(pauli_reference_violation(7) - 14 * std::cos(std::numbers::pi / 14)) < 1e-9);
}

TEST_CASE("bccb operator") {
  const double d = std::sqrt(std::log(2.0));
  const auto op = bccb_operator(real_seq({0.0, d}), real_seq({0.0, d}));
  CHECK(op.n == 2);
  CHECK(op.classical_bound == 2.0);
  CHECK(bccb_max_eigenvalue(real_seq({0.0, d}), real_seq({0.0, d})) == doctest::Approx(2 * std::numbers::sqrt2).epsilon(1e-9));

  SUBCASE("real n=3 is a real symmetric 9x9") {
    Rng rng(5);
    const auto b = random_seq(rng, 3, 2.0, false), g = random_seq(rng, 3, 2.0, false);
    const auto s = bccb_operator(b, g);
    CHECK(s.matrix.rows() == 9);
    CHECK(s.matrix.imag().norm() < 1e-14);
    CHECK((s.matrix - s.matrix.adjoint()).norm() < 1e-12);
  }

  SUBCASE("identical far-separated sequences stay classical") {
    for (int n = 2; n <= 6; ++n) {
      std::vector<double> v;
      for (int i = 0; i < n; ++i) v.push_back(9.0 * i);
      CHECK(bccb_max_eigenvalue(real_seq(v), real_seq(v)) <= classical_bound(n) + 1e-8);
    }
  }

  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(bccb_operator(real_seq({0, 1}), real_seq({0, 1, 2})), LengthMismatch);
  }

  SUBCASE("global displacement and phase leave the spectrum unchanged") {
    Rng rng(9);
    for (int k = 0; k < 5; ++k) {
      const int n = 3;
      const auto b = random_seq(rng, n, 1.5, true), g = random_seq(rng, n, 1.5, true);
      const Amplitude shift(rng.uniform(-1, 1), 0.0);
      const Complex phase = std::polar(1.0, rng.uniform(0, 6.28));
      std::vector<Amplitude> b2;
      for (const auto& v : b.values()) b2.push_back(phase * (v + shift));
      Eigen::SelfAdjointEigenSolver<CMatrix> e1(bccb_operator(b, g).matrix, Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<CMatrix> e2(bccb_operator(DisplacementSequence(b2), g).matrix, Eigen::EigenvaluesOnly);
      CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("random spectra lie inside the quantum bound") {
  Rng rng(21);
  for (int k = 0; k < 40; ++k) {
    const int n = 2 + static_cast<int>(rng.next() % 5);
    const auto b = random_seq(rng, n, 2.0, true), g = random_seq(rng, n, 2.0, true);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(bccb_operator(b, g).matrix, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().maxCoeff() <= quantum_bound(n) + 1e-8);
    CHECK(es.eigenvalues().minCoeff() >= -quantum_bound(n) - 1e-8);
  }
}

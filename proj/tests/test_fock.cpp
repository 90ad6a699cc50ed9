#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bellmzi/families.hpp"
#include "bellmzi/fock.hpp"
#include "bellmzi/rng.hpp"

using namespace bellmzi;

namespace {

TwoModeFockState vacuum(int dim) {
  TwoModeFockState s{CMatrix::Zero(dim, dim), 0.0};
  s.coefficients(0, 0) = 1.0;
  return s;
}

double local(Amplitude b) { return 1.0 - 2.0 * std::exp(-std::norm(b)); }

}  // namespace

TEST_CASE("coherent_fock") {
  const auto v = coherent_fock(0.0, 8);
  CHECK(std::abs(v.coefficients(0) - 1.0) < 1e-15);
  CHECK(v.coefficients.tail(7).norm() == 0.0);

  Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const Amplitude x(rng.uniform(-2, 2), rng.uniform(-2, 2)), y(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const int dim = poisson_truncation(9.0, 1e-20);
    const auto fx = coherent_fock(x, dim, 1e-20), fy = coherent_fock(y, dim, 1e-20);
    CHECK(std::abs(fx.coefficients.dot(fy.coefficients) - overlap(x, y)) < 1e-10);
  }

  const auto f = coherent_fock(Amplitude(1.5, -0.5));
  CHECK(std::abs(f.coefficients.squaredNorm() - (1.0 - f.tail_bound)) < 1e-12);
  CHECK(f.tail_bound < 1e-12);
  CHECK_THROWS_AS(coherent_fock(3.0, 4), TruncationTooSmall);
  CHECK_THROWS_AS(coherent_fock(0.0, kMaxFockDimension + 1), TruncationTooSmall);
}

TEST_CASE("expectation_brute") {
  const auto vac = vacuum(40);
  CHECK(expectation_brute(vac, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const Amplitude b(rng.uniform(-2, 2), rng.uniform(-2, 2)), g(rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(std::abs(expectation_brute(vac, b, g) - local(b) * local(g)) < 1e-12);
  }
  const auto tmsv = tmsv_state_fock({0.5}, 60);
  CHECK(std::abs(expectation_brute(tmsv, 0.3, -0.3) - tmsv_correlator(0.5, 0.3, -0.3)) < 1e-8);
}

TEST_CASE("dephased projector") {
  const auto p0 = dephased_projector(0.0, 6);
  CHECK(p0(0) == 1.0);
  CHECK(p0.tail(5).norm() == 0.0);
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    const int dim = poisson_truncation(a * a, 1e-14);
    CHECK(std::abs(dephased_projector(a, dim).sum() - 1.0) < 1e-10);
  }
  const Amplitude alpha(1.1, 0.4);
  const int dim = 20;
  const CMatrix quad = dephased_projector_quadrature(alpha, dim, 4096);
  const RVector diag = dephased_projector(alpha, dim);
  CHECK((quad - CMatrix(diag.cast<Complex>().asDiagonal())).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dephased BCCB values are classical") {
  Rng rng(8);
  for (int k = 0; k < 15; ++k) {
    const int n = 2 + static_cast<int>(rng.next() % 4);
    std::vector<Amplitude> b, g;
    for (int i = 0; i < n; ++i) {
      b.emplace_back(rng.uniform(-2, 2), rng.uniform(-2, 2));
      g.emplace_back(rng.uniform(-2, 2), rng.uniform(-2, 2));
    }
    const EcsParams p{rng.uniform(0.2, 2.0), Complex(rng.uniform(-2, 2), rng.uniform(-2, 2))};
    const auto state = ecs_state_fock(p, 48);
    CHECK(dephased_bccb_value(DisplacementSequence(b), DisplacementSequence(g), state) <=
          classical_bound(n) + 1e-6);
  }
}

TEST_CASE("vacuum dephased value equals an LHV mixture") {
  const std::vector<double> bs{0.2, 0.9, -0.6}, gs{0.5, -0.1, 1.3};
  std::vector<double> mx, my;
  for (double b : bs) mx.push_back(local(b));
  for (double g : gs) my.push_back(local(g));
  const double v = dephased_bccb_value(DisplacementSequence::real(bs), DisplacementSequence::real(gs), vacuum(30));
  CHECK(std::abs(v - lhv_mixture_value(mx, my)) < 1e-12);
  CHECK(std::abs(v - chained_form(mx, my)) < 1e-12);
}

TEST_CASE("lhv maximum") {
  for (int n = 2; n <= 6; ++n) CHECK(lhv_maximum(n) == classical_bound(n));
}

TEST_CASE("coherent superposition norm") {
  const std::vector<double> b{0.0, 0.8}, g{0.0, 0.8};
  CMatrix c(2, 2);
  c << 1.0, -1.0, -0.4, 1.0;
  const auto s = coherent_superposition_fock(c, DisplacementSequence::real(b), DisplacementSequence::real(g));
  CHECK(s.tail_bound < 1e-10);
  CHECK_THROWS_AS(coherent_superposition_fock(CMatrix::Zero(3, 2), DisplacementSequence::real(b),
                                              DisplacementSequence::real(g)),
                  LengthMismatch);
}

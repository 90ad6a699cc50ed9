#include "bellmzi/regression.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/LevenbergMarquardt>

namespace bellmzi {

namespace {

constexpr double kSolverTolerance = 1e-13;
constexpr double kRankTolerance = 1e-12;

struct SaturationFunctor : Eigen::DenseFunctor<double> {
  SaturationFunctor(FitModel model, const FitData& data)
      : Eigen::DenseFunctor<double>(model == FitModel::anchored ? 2 : 3,
                                    static_cast<int>(data.size())),
        model(model),
        data(data) {}

  FitModel model;
  const FitData& data;

  double predict(const Eigen::VectorXd& p, double x) const {
    if (model == FitModel::anchored)
      return anchored_value_at_two() + p(0) * (std::exp(-p(1) * x) - std::exp(-2.0 * p(1)));
    return p(0) + p(2) * std::exp(-p(1) * x);
  }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    for (std::size_t i = 0; i < data.size(); ++i)
      r(static_cast<Eigen::Index>(i)) = predict(p, data[i].first) - data[i].second;
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double x = data[i].first;
      if (model == FitModel::anchored) {
        const double e = std::exp(-p(1) * x), e2 = std::exp(-2.0 * p(1));
        j(row, 0) = e - e2;
        j(row, 1) = p(0) * (-x * e + 2.0 * e2);
      } else {
        const double e = std::exp(-p(1) * x);
        j(row, 0) = 1.0;
        j(row, 1) = -p(2) * x * e;
        j(row, 2) = e;
      }
    }
    return 0;
  }
};

// Decay rate from successive ratios of first differences, which for exact
// exponential data equal e^{-b h}.
double initial_rate(const FitData& data) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i + 2 < data.size(); ++i) {
    const double h1 = data[i + 1].first - data[i].first;
    const double h2 = data[i + 2].first - data[i + 1].first;
    const double d1 = (data[i + 1].second - data[i].second) / h1;
    const double d2 = (data[i + 2].second - data[i + 1].second) / h2;
    const double ratio = d2 / d1;
    if (!(ratio > 0.0) || !std::isfinite(ratio)) continue;
    const double rate = -std::log(ratio) / (0.5 * (h1 + h2));
    if (std::isfinite(rate) && rate > 0.0) {
      sum += rate;
      ++count;
    }
  }
  return count > 0 ? sum / count : 1.0;
}

Eigen::VectorXd initial_guess(FitModel model, const FitData& data) {
  const double b = initial_rate(data);
  const auto m = static_cast<Eigen::Index>(data.size());
  if (model == FitModel::anchored) {
    double num = 0.0, den = 0.0;
    for (const auto& [x, y] : data) {
      const double u = std::exp(-b * x) - std::exp(-2.0 * b);
      num += u * (y - anchored_value_at_two());
      den += u * u;
    }
    Eigen::VectorXd p(2);
    p << (den > 0.0 ? num / den : 0.0), b;
    return p;
  }
  Eigen::MatrixXd basis(m, 2);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    basis(i, 0) = 1.0;
    basis(i, 1) = std::exp(-b * data[static_cast<std::size_t>(i)].first);
    rhs(i) = data[static_cast<std::size_t>(i)].second;
  }
  const Eigen::VectorXd ac = basis.colPivHouseholderQr().solve(rhs);
  Eigen::VectorXd p(3);
  p << ac(0), b, ac(1);
  return p;
}

RMatrix covariance_of(const Eigen::MatrixXd& j, double sigma2) {
  const Eigen::MatrixXd jtj = j.transpose() * j;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
  const Eigen::VectorXd& w = eig.eigenvalues();
  const double cutoff = kRankTolerance * std::max(w.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > cutoff) inv(i) = 1.0 / w(i);
  RMatrix cov = sigma2 * eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (cov + cov.transpose());
}

}  // namespace

std::string to_string(FitModel m) { return m == FitModel::anchored ? "anchored" : "three"; }

FitModel fit_model_from_string(const std::string& s) {
  if (s == "anchored") return FitModel::anchored;
  if (s == "three") return FitModel::three;
  throw InvalidArgument("unknown fit model '" + s + "'");
}

double anchored_value_at_two() { return 2.0 * std::sqrt(2.0) - 2.0; }

double FitResult::value(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw InvalidArgument("fit has no parameter '" + name + "'");
}

double FitResult::predict(double n) const {
  if (model == FitModel::anchored) return value("C") + value("A_prime") * std::exp(-value("B") * n);
  return value("a") + value("c") * std::exp(-value("b") * n);
}

FitResult fit_saturation(const FitData& input, FitModel model, int max_evaluations) {
  if (input.size() < 4) throw InvalidArgument("fit needs at least 4 data points");
  for (const auto& [x, y] : input)
    if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidArgument("fit data must be finite");
  FitData data = input;
  std::sort(data.begin(), data.end());

  const std::size_t p = model == FitModel::anchored ? 2 : 3;
  std::set<double> distinct;
  for (const auto& point : data) distinct.insert(point.first);
  if (distinct.size() < p)
    throw SingularJacobian(std::to_string(distinct.size()) + " distinct abscissae for " +
                           std::to_string(p) + " free parameters");

  SaturationFunctor functor(model, data);
  Eigen::VectorXd params = initial_guess(model, data);
  Eigen::LevenbergMarquardt<SaturationFunctor> lm(functor);
  lm.setFtol(kSolverTolerance);
  lm.setXtol(kSolverTolerance);
  lm.setMaxfev(max_evaluations);
  const auto status = lm.minimize(params);
  if (status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation ||
      status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !params.allFinite())
    throw NoConvergence("fit did not converge within " + std::to_string(max_evaluations) +
                        " evaluations (status " + std::to_string(static_cast<int>(status)) + ")");

  const auto m = static_cast<Eigen::Index>(data.size());
  Eigen::VectorXd residual(m);
  functor(params, residual);
  Eigen::MatrixXd jac(m, static_cast<Eigen::Index>(p));
  functor.df(params, jac);
  if (jac.norm() == 0.0) throw SingularJacobian("Jacobian vanishes at the solution");

  FitResult out;
  out.model = model;
  out.residual_norm = residual.norm();
  out.iterations = static_cast<int>(lm.iterations());
  out.points = data.size();
  const double sigma2 = out.residual_norm * out.residual_norm / static_cast<double>(m - static_cast<Eigen::Index>(p));
  out.covariance = covariance_of(jac, sigma2);
  if (model == FitModel::anchored) {
    const double c = anchored_value_at_two() - params(0) * std::exp(-2.0 * params(1));
    out.names = {"C", "A_prime", "B"};
    out.values = {c, params(0), params(1)};
    out.free_names = {"A_prime", "B"};
  } else {
    out.names = {"a", "b", "c"};
    out.values = {params(0), params(1), params(2)};
    out.free_names = {"a", "b", "c"};
  }
  return out;
}

}  // namespace bellmzi

#pragma once

// Least-squares fits of exponential saturation curves to violation-vs-n data.
//
//   anchored:  D(n) = C + A' e^{-B n}, with C eliminated by the exact n = 2
//              value 2 sqrt(2) - 2; free parameters (A', B).
//   three:     a + c e^{-b n}; free parameters (a, b, c).

#include <string>
#include <utility>
#include <vector>

#include "bellmzi/common.hpp"

namespace bellmzi {

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

enum class FitModel { anchored, three };

std::string to_string(FitModel m);
FitModel fit_model_from_string(const std::string& s);  // throws InvalidArgument

struct FitResult {
  FitModel model = FitModel::anchored;
  std::vector<std::string> names;       // every reported parameter
  std::vector<double> values;
  std::vector<std::string> free_names;  // rows/columns of covariance
  RMatrix covariance;
  double residual_norm = 0.0;
  int iterations = 0;
  std::size_t points = 0;

  /// Throws InvalidArgument for an unknown name.
  double value(const std::string& name) const;
  double predict(double n) const;
};

using FitData = std::vector<std::pair<double, double>>;  // (n, value)

/// Levenberg-Marquardt fit. Needs at least 4 finite points and more distinct
/// abscissae than free parameters. Covariance is sigma^2 (J^T J)^{-1} with
/// sigma^2 = |r|^2 / (m - p); a pseudo-inverse is used when the Jacobian
/// loses rank at the solution (e.g. flat data, where b is undetermined).
FitResult fit_saturation(const FitData& data, FitModel model, int max_evaluations = 2000);

/// Exact n = 2 violation anchoring the two-parameter model.
double anchored_value_at_two();

}  // namespace bellmzi

#pragma once

// Powell's conjugate-direction method with Brent line searches. Derivative
// free; the objective only has to be finite on the region it visits.

#include <functional>

#include "bellmzi/common.hpp"

namespace bellmzi {

using Objective = std::function<double(const RVector&)>;

struct PowellOptions {
  double x_tolerance = 1e-8;  // fractional tolerance of each line search
  double f_tolerance = 1e-10; // relative decrease per sweep that ends the run
  long max_evaluations = 20000;
};

struct MinimizeResult {
  RVector point;
  double value = 0.0;
  long evaluations = 0;
  int iterations = 0;
  bool budget_exhausted = false;  // best-so-far returned when true
};

MinimizeResult minimize_powell(const Objective& objective, const RVector& start,
                               const PowellOptions& options = {});

}  // namespace bellmzi

#pragma once

// Multi-start maximization of the BCCB violation.
//
// Every search runs in two stages: many cheap restarts over a reduced
// parametrization, then one refinement of the best of them over the full
// real parametrization. All objectives are minimized as -<S>.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellmzi/common.hpp"
#include "bellmzi/powell.hpp"

namespace bellmzi {

enum class Kind { general, ecs, tmsv };
enum class Stage { first, second, single };

std::string to_string(Kind k);
std::string to_string(Stage s);
Kind kind_from_string(const std::string& s);    // throws InvalidArgument
Stage stage_from_string(const std::string& s);  // throws InvalidArgument

inline constexpr int kMinChain = 2;
inline constexpr int kMaxChain = 20;

struct OptimizerConfig {
  int restarts = 300;                 // stage-1 restarts
  std::uint64_t seed = 0;
  long max_evaluations = 20000;       // per stage-1 restart
  long refine_evaluations = 200000;   // for the single stage-2 refinement
  double x_tolerance = 1e-8;
  double f_tolerance = 1e-10;
  /// Overrides the stage-1 sampling box when non-empty. Must match the
  /// stage-1 parametrization's dimension.
  std::vector<std::pair<double, double>> initial_box;

  void validate() const;  // throws InvalidArgument
  PowellOptions stage1_options() const;
  PowellOptions stage2_options() const;
};

/// Settings and state parameters a parameter vector stands for. Only the
/// fields relevant to the kind are meaningful.
struct Decoded {
  std::vector<double> betas;
  std::vector<double> gammas;
  double alpha = 0.0;  // ECS
  double a = 0.0;      // ECS
  double r = 0.0;      // TMSV
};

struct Parametrization {
  std::string name;
  int dimension = 0;
  std::function<Decoded(const RVector&)> decode;
  /// Inverse of decode on settings the parametrization can represent; used
  /// to lift a stage-1 optimum into the stage-2 space.
  std::function<RVector(const Decoded&)> encode;
  std::vector<std::pair<double, double>> box;  // stage-1 sampling box
};

/// Parametrizations by name, for the given kind and chain length. Names:
///   general: "general_two_step" (stage 1), "general_real" (stage 2)
///   ecs:     "ecs_blocks", "ecs_blocks_relaxed", "ecs_full"
///   tmsv:    "tmsv_linear", "tmsv_full" (and fixed-r variants when fixed_r)
Parametrization make_parametrization(Kind kind, const std::string& name, int n,
                                     std::optional<double> fixed_r = std::nullopt);

/// <S> at decoded settings, or nullopt when the point is outside the
/// admissible region (factorization failure, displacement out of range,
/// invalid state parameters).
std::optional<double> evaluate(Kind kind, const Decoded& d);

/// Penalty objective value for inadmissible points.
inline double penalty(int n) { return 10.0 * n; }

struct StageRecord {
  std::string parametrization;
  double best_value = 0.0;
  RVector best_point;
  long evaluations = 0;
};

struct OptimizationRun {
  Kind kind = Kind::general;
  int n = 0;
  std::optional<double> fixed_r;
  std::string parametrization;
  Stage stage = Stage::single;
  double best_value = 0.0;
  RVector best_point;
  Decoded settings;
  double violation = 0.0;  // best_value - (2n - 2)
  std::vector<double> restart_histogram;
  long evaluations = 0;
  bool budget_exhausted = false;
  std::optional<StageRecord> first_stage;
  std::optional<std::string> failure;  // set when the run could not complete
};

struct ProgressEvent {
  Kind kind;
  int n;
  Stage stage;
  int restart;   // 0-based, -1 for stage-level events
  int restarts;
  double best_value;
};
using ProgressSink = std::function<void(const ProgressEvent&)>;

/// Powell minimization of `objective` from `start` under the config's
/// stage-1 tolerances.
MinimizeResult minimize_scalar(const Objective& objective, const OptimizerConfig& config,
                               const RVector& start);

OptimizationRun staged_general(int n, const OptimizerConfig& config,
                               const ProgressSink& sink = {});
OptimizationRun optimize_ecs(int n, const OptimizerConfig& config,
                             const ProgressSink& sink = {});
OptimizationRun optimize_tmsv(int n, const OptimizerConfig& config,
                              std::optional<double> fixed_r = std::nullopt,
                              const ProgressSink& sink = {});

OptimizationRun optimize(Kind kind, int n, const OptimizerConfig& config,
                         const ProgressSink& sink = {});

/// One run per n in [n_first, n_last]. A failing n is recorded in the run's
/// `failure` field and the curve continues.
std::vector<OptimizationRun> violation_curve(Kind kind, int n_first, int n_last,
                                             const OptimizerConfig& config,
                                             const ProgressSink& sink = {});

/// TMSV runs at fixed squeezing for each r in `rs`.
std::vector<OptimizationRun> tmsv_r_scan(int n, const std::vector<double>& rs,
                                         const OptimizerConfig& config,
                                         const ProgressSink& sink = {});

/// `steps` equally spaced values from r_min to r_max inclusive.
std::vector<double> linspace(double first, double last, int steps);

}  // namespace bellmzi

#include "bellmzi/optimize.hpp"

#include <cmath>
#include <limits>

#include "bellmzi/coherent.hpp"
#include "bellmzi/families.hpp"
#include "bellmzi/rng.hpp"

namespace bellmzi {

namespace {

// Admissible displacement ranges for the state families. Far outside the
// state's support every A(b) acts as the identity and the objective is flat
// at the classical value; the ECS limit is tighter because restarts drift
// onto that plateau otherwise.
constexpr double kDisplacementLimit = 6.0;
constexpr double kEcsDisplacementLimit = 4.0;
constexpr double kMinAlpha = 1e-3;
constexpr double kMaxAlpha = 6.0;
constexpr double kMaxWeight = 50.0;
// Lower limit on 1 + a^2 + 2 e^{-alpha^2} a. Near a = -1, alpha -> 0 the two
// branches cancel and the closed form loses all significant digits.
constexpr double kMinEcsDenominator = 1e-2;
constexpr int kEcsFullSearchMax = 4;

using Box = std::vector<std::pair<double, double>>;

Box repeat_box(std::pair<double, double> range, int count) {
  return Box(static_cast<std::size_t>(count), range);
}

void append(Box& box, const Box& more) { box.insert(box.end(), more.begin(), more.end()); }

std::vector<double> slice(const RVector& x, Eigen::Index from, Eigen::Index count) {
  return std::vector<double>(x.data() + from, x.data() + from + count);
}

RVector concat(std::initializer_list<double> head, const std::vector<double>& a,
               const std::vector<double>& b) {
  RVector out(static_cast<Eigen::Index>(head.size() + a.size() + b.size()));
  Eigen::Index k = 0;
  for (double v : head) out(k++) = v;
  for (double v : a) out(k++) = v;
  for (double v : b) out(k++) = v;
  return out;
}

void require_chain(int n) {
  if (n < kMinChain || n > kMaxChain)
    throw InvalidArgument("chain length n=" + std::to_string(n) + " outside [2, 20]");
}

// beta = (0, D', D'+D, ..., D'+(n-2)D), gamma = (0, D, ..., (n-2)D, (n-2)D+D').
Parametrization general_two_step(int n) {
  Parametrization p{"general_two_step", 2, {}, {}, repeat_box({0.0, 3.0}, 2)};
  p.decode = [n](const RVector& x) {
    const double step = x(0), edge = x(1);
    Decoded d;
    d.betas.push_back(0.0);
    for (int i = 0; i + 1 < n; ++i) d.betas.push_back(edge + i * step);
    for (int i = 0; i + 1 < n; ++i) d.gammas.push_back(i * step);
    d.gammas.push_back((n - 2) * step + edge);
    return d;
  };
  p.encode = [n](const Decoded& d) {
    RVector x(2);
    x(0) = n > 2 ? d.gammas[1] - d.gammas[0] : 0.0;
    x(1) = d.betas[1] - d.betas[0];
    return x;
  };
  return p;
}

// beta_1 = gamma_1 = 0 fixed by a common displacement; the rest free.
Parametrization general_real(int n) {
  Parametrization p{"general_real", 2 * n - 2, {}, {}, repeat_box({0.0, 3.0}, 2 * n - 2)};
  p.decode = [n](const RVector& x) {
    Decoded d;
    d.betas.push_back(0.0);
    d.gammas.push_back(0.0);
    for (int i = 0; i + 1 < n; ++i) d.betas.push_back(x(i));
    for (int i = 0; i + 1 < n; ++i) d.gammas.push_back(x(n - 1 + i));
    return d;
  };
  p.encode = [n](const Decoded& d) {
    RVector x(2 * n - 2);
    for (int i = 0; i + 1 < n; ++i) {
      x(i) = d.betas[static_cast<std::size_t>(i + 1)] - d.betas[0];
      x(n - 1 + i) = d.gammas[static_cast<std::size_t>(i + 1)] - d.gammas[0];
    }
    return x;
  };
  return p;
}

Box ecs_state_box() { return {{0.1, 3.0}, {0.0, 3.0}}; }
constexpr std::pair<double, double> kEcsDisplacementBox{-0.5, 3.0};

// Block pattern of the ECS optima: the first n-1 settings of each party
// coincide and only the last one differs,
//   beta = (b1, ..., b1, b2), gamma = (g1, ..., g1, g2).
// Optima of the mirrored form (first setting differing) are the same points
// under the chain symmetry beta'_i = gamma_{n+1-i}, gamma'_i = beta_{n+1-i}.
std::vector<double> ecs_block(int n, double head, double last) {
  std::vector<double> v(static_cast<std::size_t>(n), head);
  v.back() = last;
  return v;
}

Parametrization ecs_blocks(int n) {
  Parametrization p{"ecs_blocks", 6, {}, {}, ecs_state_box()};
  append(p.box, repeat_box(kEcsDisplacementBox, 4));
  p.decode = [n](const RVector& x) {
    Decoded d;
    d.alpha = x(0);
    d.a = x(1);
    d.betas = ecs_block(n, x(2), x(3));
    d.gammas = ecs_block(n, x(4), x(5));
    return d;
  };
  p.encode = [](const Decoded& d) {
    return concat({d.alpha, d.a, d.betas.front(), d.betas.back(), d.gammas.front(),
                   d.gammas.back()}, {}, {});
  };
  return p;
}

// Betas free, gammas in the block pattern.
Parametrization ecs_blocks_relaxed(int n) {
  Parametrization p{"ecs_blocks_relaxed", n + 4, {}, {}, ecs_state_box()};
  append(p.box, repeat_box(kEcsDisplacementBox, n + 2));
  p.decode = [n](const RVector& x) {
    Decoded d;
    d.alpha = x(0);
    d.a = x(1);
    d.betas = slice(x, 2, n);
    d.gammas = ecs_block(n, x(n + 2), x(n + 3));
    return d;
  };
  p.encode = [](const Decoded& d) {
    return concat({d.alpha, d.a}, d.betas, {d.gammas.front(), d.gammas.back()});
  };
  return p;
}

Parametrization ecs_full(int n) {
  Parametrization p{"ecs_full", 2 * n + 2, {}, {}, ecs_state_box()};
  append(p.box, repeat_box(kEcsDisplacementBox, 2 * n));
  p.decode = [n](const RVector& x) {
    Decoded d;
    d.alpha = x(0);
    d.a = x(1);
    d.betas = slice(x, 2, n);
    d.gammas = slice(x, 2 + n, n);
    return d;
  };
  p.encode = [](const Decoded& d) { return concat({d.alpha, d.a}, d.betas, d.gammas); };
  return p;
}

// r enters as |x_0| so the search never leaves the physical half-line.
// beta_i = b0 + i db, gamma_i = g0 + i dg.
Parametrization tmsv_linear(int n, std::optional<double> fixed_r) {
  const int offset = fixed_r ? 0 : 1;
  Parametrization p{fixed_r ? "tmsv_linear_fixed_r" : "tmsv_linear", 4 + offset, {}, {}, {}};
  if (!fixed_r) p.box.push_back({0.0, 1.5});
  append(p.box, {{-1.5, 1.5}, {-0.5, 0.5}, {-1.5, 1.5}, {-0.5, 0.5}});
  p.decode = [n, fixed_r, offset](const RVector& x) {
    Decoded d;
    d.r = fixed_r ? *fixed_r : std::abs(x(0));
    for (int i = 0; i < n; ++i) {
      d.betas.push_back(x(offset) + i * x(offset + 1));
      d.gammas.push_back(x(offset + 2) + i * x(offset + 3));
    }
    return d;
  };
  p.encode = [fixed_r](const Decoded& d) {
    const double db = d.betas[1] - d.betas[0], dg = d.gammas[1] - d.gammas[0];
    if (fixed_r) return concat({d.betas[0], db, d.gammas[0], dg}, {}, {});
    return concat({d.r, d.betas[0], db, d.gammas[0], dg}, {}, {});
  };
  return p;
}

Parametrization tmsv_full(int n, std::optional<double> fixed_r) {
  const int offset = fixed_r ? 0 : 1;
  Parametrization p{fixed_r ? "tmsv_full_fixed_r" : "tmsv_full", 2 * n + offset, {}, {}, {}};
  if (!fixed_r) p.box.push_back({0.0, 1.5});
  append(p.box, repeat_box({-1.5, 1.5}, 2 * n));
  p.decode = [n, fixed_r, offset](const RVector& x) {
    Decoded d;
    d.r = fixed_r ? *fixed_r : std::abs(x(0));
    d.betas = slice(x, offset, n);
    d.gammas = slice(x, offset + n, n);
    return d;
  };
  p.encode = [fixed_r](const Decoded& d) {
    if (fixed_r) return concat({}, d.betas, d.gammas);
    return concat({d.r}, d.betas, d.gammas);
  };
  return p;
}

bool within(const std::vector<double>& v, double limit) {
  for (double x : v)
    if (!std::isfinite(x) || std::abs(x) > limit) return false;
  return true;
}

Objective objective_for(Kind kind, const Parametrization& p, int n) {
  return [kind, decode = p.decode, n](const RVector& x) {
    const auto value = evaluate(kind, decode(x));
    return value ? -*value : penalty(n);
  };
}

RVector sample(const Box& box, Rng& rng) {
  RVector x(static_cast<Eigen::Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i)
    x(static_cast<Eigen::Index>(i)) = rng.uniform(box[i].first, box[i].second);
  return x;
}

struct StagePlan {
  Parametrization first;
  std::optional<Parametrization> second;  // absent: single-stage run
};

OptimizationRun run_staged(Kind kind, int n, std::optional<double> fixed_r,
                           const StagePlan& plan, const OptimizerConfig& config,
                           const ProgressSink& sink) {
  config.validate();
  const Box& box = config.initial_box.empty() ? plan.first.box : config.initial_box;
  if (static_cast<int>(box.size()) != plan.first.dimension)
    throw InvalidArgument("initial box has " + std::to_string(box.size()) +
                          " entries, parametrization " + plan.first.name + " needs " +
                          std::to_string(plan.first.dimension));

  OptimizationRun run;
  run.kind = kind;
  run.n = n;
  run.fixed_r = fixed_r;
  run.restart_histogram.reserve(static_cast<std::size_t>(config.restarts));

  const Objective first_objective = objective_for(kind, plan.first, n);
  const PowellOptions first_options = config.stage1_options();
  double best = -std::numeric_limits<double>::infinity();
  RVector best_point;
  long evaluations = 0;
  bool exhausted = false;
  for (int k = 0; k < config.restarts; ++k) {
    Rng rng(config.seed, static_cast<std::uint64_t>(k));
    const MinimizeResult res = minimize_powell(first_objective, sample(box, rng), first_options);
    const double value = -res.value;
    run.restart_histogram.push_back(value);
    evaluations += res.evaluations;
    // Strict comparison: ties go to the lowest restart index.
    if (value > best) {
      best = value;
      best_point = res.point;
      exhausted = res.budget_exhausted;
    }
    if (sink) sink({kind, n, Stage::first, k, config.restarts, best});
  }
  if (!evaluate(kind, plan.first.decode(best_point))) {
    run.failure = "no admissible point found in " + std::to_string(config.restarts) + " restarts";
    run.parametrization = plan.first.name;
    run.stage = Stage::first;
    run.best_value = best;
    run.best_point = best_point;
    run.evaluations = evaluations;
    return run;
  }

  if (!plan.second) {
    run.parametrization = plan.first.name;
    run.stage = Stage::single;
    run.best_value = best;
    run.best_point = best_point;
    run.settings = plan.first.decode(best_point);
    run.budget_exhausted = exhausted;
  } else {
    run.first_stage = StageRecord{plan.first.name, best, best_point, evaluations};
    const Parametrization& full = *plan.second;
    const RVector start = full.encode(plan.first.decode(best_point));
    const MinimizeResult res =
        minimize_powell(objective_for(kind, full, n), start, config.stage2_options());
    evaluations += res.evaluations;
    run.parametrization = full.name;
    run.stage = Stage::second;
    run.best_value = -res.value;
    run.best_point = res.point;
    run.settings = full.decode(res.point);
    run.budget_exhausted = res.budget_exhausted;
    if (sink) sink({kind, n, Stage::second, -1, 1, run.best_value});
  }
  run.evaluations = evaluations;
  run.violation = run.best_value - classical_bound(n);
  return run;
}

}  // namespace

std::string to_string(Kind k) {
  switch (k) {
    case Kind::general: return "general";
    case Kind::ecs: return "ecs";
    case Kind::tmsv: return "tmsv";
  }
  return "unknown";
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::first: return "first";
    case Stage::second: return "second";
    case Stage::single: return "single";
  }
  return "unknown";
}

Kind kind_from_string(const std::string& s) {
  if (s == "general") return Kind::general;
  if (s == "ecs") return Kind::ecs;
  if (s == "tmsv") return Kind::tmsv;
  throw InvalidArgument("unknown kind '" + s + "'");
}

Stage stage_from_string(const std::string& s) {
  if (s == "first") return Stage::first;
  if (s == "second") return Stage::second;
  if (s == "single") return Stage::single;
  throw InvalidArgument("unknown stage '" + s + "'");
}

void OptimizerConfig::validate() const {
  if (restarts < 1) throw InvalidArgument("restarts must be >= 1");
  if (!(x_tolerance > 0.0) || !(f_tolerance > 0.0))
    throw InvalidArgument("tolerances must be positive");
  if (max_evaluations < 1 || refine_evaluations < 1)
    throw InvalidArgument("evaluation budgets must be positive");
  for (const auto& [lo, hi] : initial_box)
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw InvalidArgument("initial box intervals must be finite with lo <= hi");
}

PowellOptions OptimizerConfig::stage1_options() const {
  return {x_tolerance, f_tolerance, max_evaluations};
}

PowellOptions OptimizerConfig::stage2_options() const {
  return {x_tolerance, f_tolerance, refine_evaluations};
}

Parametrization make_parametrization(Kind kind, const std::string& name, int n,
                                     std::optional<double> fixed_r) {
  require_chain(n);
  switch (kind) {
    case Kind::general:
      if (name == "general_two_step") return general_two_step(n);
      if (name == "general_real") return general_real(n);
      break;
    case Kind::ecs:
      if (name == "ecs_blocks") return ecs_blocks(n);
      if (name == "ecs_blocks_relaxed") return ecs_blocks_relaxed(n);
      if (name == "ecs_full") return ecs_full(n);
      break;
    case Kind::tmsv:
      if (name == "tmsv_linear" || name == "tmsv_linear_fixed_r") return tmsv_linear(n, fixed_r);
      if (name == "tmsv_full" || name == "tmsv_full_fixed_r") return tmsv_full(n, fixed_r);
      break;
  }
  throw InvalidArgument("unknown parametrization '" + name + "' for kind " + to_string(kind));
}

std::optional<double> evaluate(Kind kind, const Decoded& d) {
  try {
    switch (kind) {
      case Kind::general: {
        if (!within(d.betas, std::numeric_limits<double>::max()) ||
            !within(d.gammas, std::numeric_limits<double>::max()))
          return std::nullopt;
        return bccb_max_eigenvalue(DisplacementSequence::real(d.betas),
                                   DisplacementSequence::real(d.gammas));
      }
      case Kind::ecs: {
        if (!within(d.betas, kEcsDisplacementLimit) || !within(d.gammas, kEcsDisplacementLimit))
          return std::nullopt;
        if (!(d.alpha >= kMinAlpha && d.alpha <= kMaxAlpha) || !(std::abs(d.a) <= kMaxWeight))
          return std::nullopt;
        if (!(1.0 + d.a * d.a + 2.0 * std::exp(-d.alpha * d.alpha) * d.a >= kMinEcsDenominator))
          return std::nullopt;
        return ecs_expectation({d.alpha, Complex(d.a, 0.0)}, DisplacementSequence::real(d.betas),
                               DisplacementSequence::real(d.gammas));
      }
      case Kind::tmsv: {
        if (!within(d.betas, kDisplacementLimit) || !within(d.gammas, kDisplacementLimit))
          return std::nullopt;
        if (!(d.r >= 0.0 && d.r <= kMaxSqueezing)) return std::nullopt;
        return tmsv_expectation({d.r}, DisplacementSequence::real(d.betas),
                                DisplacementSequence::real(d.gammas));
      }
    }
  } catch (const FactorizationFailure&) {
    return std::nullopt;
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
  return std::nullopt;
}

MinimizeResult minimize_scalar(const Objective& objective, const OptimizerConfig& config,
                               const RVector& start) {
  config.validate();
  return minimize_powell(objective, start, config.stage1_options());
}

OptimizationRun staged_general(int n, const OptimizerConfig& config, const ProgressSink& sink) {
  require_chain(n);
  StagePlan plan{general_two_step(n), general_real(n)};
  return run_staged(Kind::general, n, std::nullopt, plan, config, sink);
}

OptimizationRun optimize_ecs(int n, const OptimizerConfig& config, const ProgressSink& sink) {
  require_chain(n);
  // Short chains are searched over the full form directly: it is small, and
  // for n <= 4 the block optimum lies outside the global basin.
  if (n <= kEcsFullSearchMax)
    return run_staged(Kind::ecs, n, std::nullopt, {ecs_full(n), std::nullopt}, config, sink);
  StagePlan plan{ecs_blocks(n), ecs_full(n)};
  return run_staged(Kind::ecs, n, std::nullopt, plan, config, sink);
}

OptimizationRun optimize_tmsv(int n, const OptimizerConfig& config, std::optional<double> fixed_r,
                              const ProgressSink& sink) {
  require_chain(n);
  if (fixed_r && !(*fixed_r >= 0.0 && *fixed_r <= kMaxSqueezing))
    throw InvalidArgument("fixed_r=" + std::to_string(*fixed_r) + " outside [0, 3]");
  StagePlan plan{tmsv_linear(n, fixed_r), tmsv_full(n, fixed_r)};
  return run_staged(Kind::tmsv, n, fixed_r, plan, config, sink);
}

OptimizationRun optimize(Kind kind, int n, const OptimizerConfig& config, const ProgressSink& sink) {
  switch (kind) {
    case Kind::general: return staged_general(n, config, sink);
    case Kind::ecs: return optimize_ecs(n, config, sink);
    case Kind::tmsv: return optimize_tmsv(n, config, std::nullopt, sink);
  }
  throw InvalidArgument("unknown kind");
}

std::vector<OptimizationRun> violation_curve(Kind kind, int n_first, int n_last,
                                             const OptimizerConfig& config,
                                             const ProgressSink& sink) {
  require_chain(n_first);
  require_chain(n_last);
  if (n_first > n_last) throw InvalidArgument("empty n range");
  std::vector<OptimizationRun> runs;
  for (int n = n_first; n <= n_last; ++n) {
    try {
      runs.push_back(optimize(kind, n, config, sink));
    } catch (const std::exception& e) {
      OptimizationRun failed;
      failed.kind = kind;
      failed.n = n;
      failed.failure = e.what();
      runs.push_back(std::move(failed));
    }
  }
  return runs;
}

std::vector<OptimizationRun> tmsv_r_scan(int n, const std::vector<double>& rs,
                                         const OptimizerConfig& config, const ProgressSink& sink) {
  std::vector<OptimizationRun> runs;
  runs.reserve(rs.size());
  for (double r : rs) runs.push_back(optimize_tmsv(n, config, r, sink));
  return runs;
}

std::vector<double> linspace(double first, double last, int steps) {
  if (steps < 1) throw InvalidArgument("steps must be >= 1");
  if (steps == 1) return {first};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    out.push_back(i + 1 == steps ? last : first + (last - first) * i / (steps - 1));
  return out;
}

}  // namespace bellmzi

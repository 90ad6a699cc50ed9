#include "bellmzi/powell.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace bellmzi {

namespace {

constexpr double kGolden = 1.618033988749895;
constexpr double kCGold = 0.3819660112501051;
constexpr double kGrowLimit = 110.0;
constexpr double kTiny = 1e-21;
constexpr double kMinTol = 1e-11;
constexpr int kBrentMaxIter = 500;

struct BudgetExhausted {};

// Counts evaluations, remembers the best point seen, and throws
// BudgetExhausted once the budget is spent.
class CountedObjective {
 public:
  CountedObjective(const Objective& f, long budget) : f_(f), budget_(budget) {}

  double operator()(const RVector& x) {
    if (evaluations_ >= budget_) throw BudgetExhausted{};
    ++evaluations_;
    double v = f_(x);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::max();
    if (v < best_value_) {
      best_value_ = v;
      best_point_ = x;
    }
    return v;
  }

  long evaluations() const { return evaluations_; }
  double best_value() const { return best_value_; }
  const RVector& best_point() const { return best_point_; }

 private:
  const Objective& f_;
  long budget_;
  long evaluations_ = 0;
  double best_value_ = std::numeric_limits<double>::infinity();
  RVector best_point_;
};

struct Bracket {
  double a, b, c, fa, fb, fc;
};

template <typename F>
Bracket bracket(F&& f, double xa, double xb) {
  double fa = f(xa), fb = f(xb);
  if (fa < fb) {
    std::swap(xa, xb);
    std::swap(fa, fb);
  }
  double xc = xb + kGolden * (xb - xa);
  double fc = f(xc);
  while (fc < fb) {
    const double tmp1 = (xb - xa) * (fb - fc);
    const double tmp2 = (xb - xc) * (fb - fa);
    const double val = tmp2 - tmp1;
    const double denom = std::abs(val) < kTiny ? 2.0 * kTiny : 2.0 * val;
    double w = xb - ((xb - xc) * tmp2 - (xb - xa) * tmp1) / denom;
    const double wlim = xb + kGrowLimit * (xc - xb);
    double fw;
    if ((w - xc) * (xb - w) > 0.0) {
      fw = f(w);
      if (fw < fc) {
        return {xb, w, xc, fb, fw, fc};
      } else if (fw > fb) {
        return {xa, xb, w, fa, fb, fw};
      }
      w = xc + kGolden * (xc - xb);
      fw = f(w);
    } else if ((w - wlim) * (wlim - xc) >= 0.0) {
      w = wlim;
      fw = f(w);
    } else if ((w - wlim) * (xc - w) > 0.0) {
      fw = f(w);
      if (fw < fc) {
        xb = xc;
        xc = w;
        w = xc + kGolden * (xc - xb);
        fb = fc;
        fc = fw;
        fw = f(w);
      }
    } else {
      w = xc + kGolden * (xc - xb);
      fw = f(w);
    }
    xa = xb;
    xb = xc;
    xc = w;
    fa = fb;
    fb = fc;
    fc = fw;
  }
  return {xa, xb, xc, fa, fb, fc};
}

// Brent's parabolic / golden-section minimizer inside a bracket.
template <typename F>
std::pair<double, double> brent(F&& f, const Bracket& br, double tol) {
  double a = std::min(br.a, br.c), b = std::max(br.a, br.c);
  double x = br.b, w = br.b, v = br.b;
  double fx = br.fb, fw = br.fb, fv = br.fb;
  double deltax = 0.0, rat = 0.0;
  for (int iter = 0; iter < kBrentMaxIter; ++iter) {
    const double tol1 = tol * std::abs(x) + kMinTol;
    const double tol2 = 2.0 * tol1;
    const double xmid = 0.5 * (a + b);
    if (std::abs(x - xmid) < (tol2 - 0.5 * (b - a))) break;
    if (std::abs(deltax) <= tol1) {
      deltax = x >= xmid ? a - x : b - x;
      rat = kCGold * deltax;
    } else {
      const double tmp1 = (x - w) * (fx - fv);
      double tmp2 = (x - v) * (fx - fw);
      double p = (x - v) * tmp2 - (x - w) * tmp1;
      tmp2 = 2.0 * (tmp2 - tmp1);
      if (tmp2 > 0.0) p = -p;
      tmp2 = std::abs(tmp2);
      const double dx_temp = deltax;
      deltax = rat;
      if (p > tmp2 * (a - x) && p < tmp2 * (b - x) && std::abs(p) < std::abs(0.5 * tmp2 * dx_temp)) {
        rat = p / tmp2;
        const double u = x + rat;
        if ((u - a) < tol2 || (b - u) < tol2) rat = xmid - x >= 0.0 ? tol1 : -tol1;
      } else {
        deltax = x >= xmid ? a - x : b - x;
        rat = kCGold * deltax;
      }
    }
    const double u = std::abs(rat) < tol1 ? (rat >= 0.0 ? x + tol1 : x - tol1) : x + rat;
    const double fu = f(u);
    if (fu > fx) {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; w = u; fv = fw; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    } else {
      if (u >= x) a = x; else b = x;
      v = w; w = x; x = u;
      fv = fw; fw = fx; fx = fu;
    }
  }
  return {x, fx};
}

// Minimizes along `direction` from `point`; updates both in place (the
// direction is scaled by the step taken). Returns the new value.
double line_search(CountedObjective& f, RVector& point, RVector& direction, double tol) {
  auto along = [&](double t) -> double { return f(point + t * direction); };
  const Bracket br = bracket(along, 0.0, 1.0);
  const auto [t, value] = brent(along, br, tol);
  direction *= t;
  point += direction;
  return value;
}

}  // namespace

MinimizeResult minimize_powell(const Objective& objective, const RVector& start,
                               const PowellOptions& options) {
  const Eigen::Index dim = start.size();
  CountedObjective f(objective, options.max_evaluations);
  MinimizeResult out;
  RVector x = start;
  RMatrix directions = RMatrix::Identity(dim, dim);
  const double line_tol = options.x_tolerance * 100.0;
  try {
    double fval = f(x);
    RVector x1 = x;
    while (true) {
      ++out.iterations;
      const double fx = fval;
      Eigen::Index biggest = 0;
      double delta = 0.0;
      for (Eigen::Index i = 0; i < dim; ++i) {
        RVector dir = directions.row(i).transpose();
        const double before = fval;
        fval = line_search(f, x, dir, line_tol);
        if (before - fval > delta) {
          delta = before - fval;
          biggest = i;
        }
      }
      if (2.0 * (fx - fval) <= options.f_tolerance * (std::abs(fx) + std::abs(fval)) + 1e-20) break;

      RVector extrapolated_dir = x - x1;
      const RVector x2 = 2.0 * x - x1;
      x1 = x;
      const double fx2 = f(x2);
      if (fx > fx2) {
        double t = 2.0 * (fx + fx2 - 2.0 * fval);
        double tmp = fx - fval - delta;
        t *= tmp * tmp;
        tmp = fx - fx2;
        t -= delta * tmp * tmp;
        if (t < 0.0) {
          fval = line_search(f, x, extrapolated_dir, line_tol);
          if (extrapolated_dir.squaredNorm() > 0.0) {
            directions.row(biggest) = directions.row(dim - 1);
            directions.row(dim - 1) = extrapolated_dir.transpose();
          }
        }
      }
    }
    out.point = x;
    out.value = fval;
  } catch (const BudgetExhausted&) {
    out.budget_exhausted = true;
  }
  // Line searches may probe a better point than the one they return.
  if (out.budget_exhausted || f.best_value() < out.value) {
    out.point = f.best_point();
    out.value = f.best_value();
  }
  out.evaluations = f.evaluations();
  return out;
}

}  // namespace bellmzi

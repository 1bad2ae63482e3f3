#include "relayee/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relayee/units.hpp"

namespace relayee {

namespace {
constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2
}

GoldenResult golden_section_max(const std::function<double(double)>& objective, double lo,
                                double hi, double tol, int coarse_points, int max_iters) {
  if (!(lo < hi)) throw InvalidParameterError("golden section needs lo < hi");
  GoldenResult result;

  // Coarse scan: bracket the best peak and detect extra local maxima.
  coarse_points = std::max(coarse_points, 3);
  std::vector<double> xs(coarse_points), fs(coarse_points);
  int best = 0;
  for (int i = 0; i < coarse_points; ++i) {
    xs[i] = lo + (hi - lo) * i / (coarse_points - 1);
    fs[i] = objective(xs[i]);
    ++result.evaluations;
    if (fs[i] > fs[best]) best = i;
  }
  int peaks = 0;
  for (int i = 0; i < coarse_points; ++i) {
    const bool left_ok = i == 0 || fs[i] >= fs[i - 1];
    const bool right_ok = i + 1 == coarse_points || fs[i] >= fs[i + 1];
    if (left_ok && right_ok) ++peaks;
  }
  result.unimodal = peaks <= 1;

  double a = best > 0 ? xs[best - 1] : xs[best];
  double b = best + 1 < coarse_points ? xs[best + 1] : xs[best];
  if (a == b) {
    result.x = xs[best];
    result.value = fs[best];
    return result;
  }

  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  result.evaluations += 2;
  for (int it = 0; it < max_iters && (b - a) > tol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = objective(x1);
    }
    ++result.evaluations;
  }
  result.x = f1 > f2 ? x1 : x2;
  result.value = std::max(f1, f2);
  if (fs[best] > result.value) {
    result.x = xs[best];
    result.value = fs[best];
  }
  return result;
}

namespace {

struct PointEval {
  double ee = 0.0;
  double delay = 0.0;
};

PointEval eval_point(const ModelConfig& config, Mode mode, double alpha, double snr_db) {
  const EvalDetail d = evaluate(config, mode, alpha, snr_db);
  return {d.metrics.ee, d.metrics.delay};
}

// Golden-section tolerance in dB equivalent to a relative linear tolerance.
double db_tol(double rel_tol) { return 10.0 * std::log10(1.0 + rel_tol); }

struct ConstrainedBest {
  bool feasible = false;
  double snr_db = 0.0;
  double ee = -std::numeric_limits<double>::infinity();
  double delay = 0.0;
  double min_delay = 0.0;  // delay at snr_max (the smallest achievable)
};

// Best EE over the delay-feasible SNR range [snr_lb(D0), snr_max]; the
// feasible set is an interval because delay decreases with SNR.
ConstrainedBest best_over_snr(const ModelConfig& config, Mode mode, double alpha,
                              std::optional<double> delay_budget) {
  const double lo = config.optimizer.snr_min_db;
  const double hi = config.optimizer.snr_max_db;
  ConstrainedBest out;
  out.min_delay = eval_point(config, mode, alpha, hi).delay;

  double lb = lo;
  if (delay_budget) {
    if (out.min_delay > *delay_budget) return out;  // infeasible at this alpha
    if (eval_point(config, mode, alpha, lo).delay > *delay_budget) {
      double a = lo, b = hi;
      for (int i = 0; i < 40 && (b - a) > 1e-6; ++i) {
        double mid = 0.5 * (a + b);
        (eval_point(config, mode, alpha, mid).delay > *delay_budget ? a : b) = mid;
      }
      lb = b;
    }
  }
  auto objective = [&](double snr_db) { return eval_point(config, mode, alpha, snr_db).ee; };
  GoldenResult gs = golden_section_max(objective, lb, hi, db_tol(config.optimizer.tol));
  PointEval at = eval_point(config, mode, alpha, gs.x);
  if (delay_budget && at.delay > *delay_budget) {
    // Numerical edge: fall back to the feasibility boundary.
    gs.x = hi;
    at = eval_point(config, mode, alpha, hi);
  }
  out.feasible = true;
  out.snr_db = gs.x;
  out.ee = at.ee;
  out.delay = at.delay;
  return out;
}

std::vector<double> alpha_grid(const OptimizerConfig& opt) {
  std::vector<double> grid(opt.alpha_grid);
  for (int i = 0; i < opt.alpha_grid; ++i) {
    grid[i] = static_cast<double>(i + 1) / (opt.alpha_grid + 1);
  }
  return grid;
}

}  // namespace

PlanResult optimize_relay_at_alpha(const ModelConfig& config, double alpha,
                                   std::optional<double> delay_budget) {
  ConstrainedBest best = best_over_snr(config, Mode::kRelay, alpha, delay_budget);
  if (!best.feasible) {
    throw InfeasibleError("delay budget below the minimum achievable relay delay",
                          best.min_delay);
  }
  PlanResult plan;
  plan.mode = Mode::kRelay;
  plan.alpha_star = alpha;
  plan.snr_db_star = best.snr_db;
  plan.snr_db_star_relay = best.snr_db;  // relay SNR tied to the source SNR
  plan.ee = best.ee;
  plan.delay = best.delay;
  plan.feasible = true;
  plan.policy = {{config.amc.boundaries, best.snr_db}, {config.amc.boundaries, best.snr_db}};
  return plan;
}

PlanResult optimize_relay(const ModelConfig& config, std::optional<double> delay_budget) {
  PlanResult best;
  best.mode = Mode::kRelay;
  best.feasible = false;
  best.ee = -std::numeric_limits<double>::infinity();
  double min_delay = std::numeric_limits<double>::infinity();
  for (double alpha : alpha_grid(config.optimizer)) {
    ConstrainedBest point = best_over_snr(config, Mode::kRelay, alpha, delay_budget);
    min_delay = std::min(min_delay, point.min_delay);
    if (!point.feasible) continue;
    if (point.ee > best.ee) {
      best.feasible = true;
      best.alpha_star = alpha;
      best.snr_db_star = point.snr_db;
      best.snr_db_star_relay = point.snr_db;
      best.ee = point.ee;
      best.delay = point.delay;
    }
  }
  if (!best.feasible) {
    throw InfeasibleError("delay budget below the minimum achievable relay delay", min_delay);
  }
  best.policy = {{config.amc.boundaries, best.snr_db_star},
                 {config.amc.boundaries, best.snr_db_star_relay}};
  return best;
}

PlanResult optimize_direct(const ModelConfig& config, std::optional<double> delay_budget) {
  ConstrainedBest point = best_over_snr(config, Mode::kDirect, 0.5, delay_budget);
  if (!point.feasible) {
    throw InfeasibleError("delay budget below the minimum achievable direct delay",
                          point.min_delay);
  }
  PlanResult plan;
  plan.mode = Mode::kDirect;
  plan.snr_db_star = point.snr_db;
  plan.ee = point.ee;
  plan.delay = point.delay;
  plan.feasible = true;
  plan.policy = {{config.amc.boundaries, point.snr_db}};
  return plan;
}

std::vector<AmcPolicy> amc_policy(const PlanResult& plan) {
  if (!plan.feasible) throw InfeasibleError("cannot extract a policy from an infeasible plan", 0);
  return plan.policy;
}

namespace {

// EE-vs-budget curves on a shared SNR grid: entry i holds the metrics at
// grid SNR i; the constrained optimum at budget D is the best EE among
// entries with delay <= D.
struct CurvePoint {
  double snr_db;
  double ee;
  double delay;
};

std::vector<CurvePoint> ee_delay_curve(const ModelConfig& config, Mode mode, double alpha,
                                       int points) {
  std::vector<CurvePoint> curve(points);
  for (int i = 0; i < points; ++i) {
    double snr = config.optimizer.snr_min_db +
                 (config.optimizer.snr_max_db - config.optimizer.snr_min_db) * i / (points - 1);
    PointEval e = eval_point(config, mode, alpha, snr);
    curve[i] = {snr, e.ee, e.delay};
  }
  return curve;
}

double best_ee_at_budget(const std::vector<CurvePoint>& curve, double budget) {
  double best = -std::numeric_limits<double>::infinity();
  for (const CurvePoint& p : curve) {
    if (p.delay <= budget) best = std::max(best, p.ee);
  }
  return best;
}

double min_delay(const std::vector<CurvePoint>& curve) {
  double d = std::numeric_limits<double>::infinity();
  for (const CurvePoint& p : curve) d = std::min(d, p.delay);
  return d;
}

double max_delay(const std::vector<CurvePoint>& curve) {
  double d = 0.0;
  for (const CurvePoint& p : curve) d = std::max(d, p.delay);
  return d;
}

}  // namespace

SwitchDecision switch_decision(const ModelConfig& config, double delay_budget, double alpha) {
  SwitchDecision decision;
  const double a_ar = SpectrumAccess{config.access_ar.q, config.access_ar.u}.avail();
  const double a_rd = SpectrumAccess{config.access_rd.q, config.access_rd.u}.avail();
  const double a_ad = SpectrumAccess{config.access_ad.q, config.access_ad.u}.avail();
  decision.access_lhs = a_ad;
  decision.access_rhs_literal = (a_ar + a_rd * alpha) / (1.0 + alpha);
  decision.access_rhs_mixture = alpha * a_ar + (1.0 - alpha) * a_rd;

  const int grid = 64;
  const auto relay = ee_delay_curve(config, Mode::kRelay, alpha, grid);
  const auto direct = ee_delay_curve(config, Mode::kDirect, alpha, grid);

  auto gap = [&](double budget) {
    return best_ee_at_budget(relay, budget) - best_ee_at_budget(direct, budget);
  };

  decision.ee_relay = best_ee_at_budget(relay, delay_budget);
  decision.ee_direct = best_ee_at_budget(direct, delay_budget);
  decision.chosen = decision.ee_relay > decision.ee_direct ? Mode::kRelay : Mode::kDirect;

  // Scan budgets between the smallest achievable delay and the relaxed
  // regime; a sign change brackets the threshold.
  const double d_lo = std::min(min_delay(relay), min_delay(direct));
  const double d_hi = std::max(max_delay(relay), max_delay(direct)) * 1.05;
  const int scan = 96;
  double prev_budget = 0.0;
  double prev_gap = 0.0;
  bool have_prev = false;
  for (int i = 0; i <= scan; ++i) {
    const double budget = d_lo + (d_hi - d_lo) * i / scan;
    const double g = gap(budget);
    if (!std::isfinite(g)) continue;  // one side infeasible at this budget
    if (have_prev && g * prev_gap < 0.0) {
      double a = prev_budget, b = budget;
      for (int it = 0; it < 60 && (b - a) > 1e-9 * std::max(1.0, b); ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = gap(mid);
        if (gm * prev_gap > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      decision.threshold = 0.5 * (a + b);
      break;
    }
    if (g != 0.0) {
      prev_budget = budget;
      prev_gap = g;
      have_prev = true;
    }
  }
  return decision;
}

EepResult eep_boundaries(const ModelConfig& config) {
  const int n_modes = config.amc.num_modes();
  EepResult result;
  if (n_modes == 1) {
    result.interior = {0.0};  // a single mode leaves nothing to partition
    ModelConfig probe = config;
    probe.amc = make_table(config.amc.modes, result.interior);
    result.ee = evaluate_relay(probe, config.alpha, config.snr_db).metrics.ee;
    return result;
  }

  const double p_target = std::pow(config.system.loss_budget, 1.0 / (config.system.max_tx + 1));
  std::vector<double> interior = msre_boundaries(config.amc.modes, p_target);

  ModelConfig probe = config;
  auto ee_of = [&](const std::vector<double>& bounds) {
    probe.amc = make_table(config.amc.modes, bounds);
    return evaluate_relay(probe, config.alpha, config.snr_db).metrics.ee;
  };

  double ee = ee_of(interior);
  for (int sweep = 0; sweep < config.optimizer.max_eep_sweeps; ++sweep) {
    const double ee_before = ee;
    for (int n = 0; n < n_modes; ++n) {
      const double lo = n == 0 ? 1e-6 : interior[n - 1] * (1.0 + 1e-9);
      const double hi = n + 1 < n_modes ? interior[n + 1] * (1.0 - 1e-9) : interior[n] * 6.0;
      if (!(lo < hi)) continue;
      std::vector<double> trial = interior;
      GoldenResult gs = golden_section_max(
          [&](double s) {
            trial[n] = s;
            return ee_of(trial);
          },
          lo, hi, (hi - lo) * 1e-3, 7, 40);
      if (gs.value > ee) {  // monotone guard: keep the incumbent on ties
        interior[n] = gs.x;
        ee = gs.value;
      }
    }
    ++result.sweeps;
    if (ee - ee_before <= 1e-6 * std::max(1.0, std::abs(ee_before))) break;
  }
  result.interior = interior;
  result.ee = ee;
  return result;
}

}  // namespace relayee

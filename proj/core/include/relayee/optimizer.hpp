#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "relayee/metrics.hpp"

namespace relayee {

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  bool unimodal = true;  // false when the coarse scan saw multiple peaks
  int evaluations = 0;
};

/// Maximize a scalar function on [lo, hi]: coarse scan to bracket the best
/// peak, then golden-section refinement down to `tol` (absolute in x).
GoldenResult golden_section_max(const std::function<double(double)>& objective, double lo,
                                double hi, double tol, int coarse_points = 9,
                                int max_iters = 200);

/// One rate-adaptation policy: the boundary set plus the operating SNR.
struct AmcPolicy {
  std::vector<double> boundaries;  // full list, linear SNR
  double snr_db = 0.0;
};

struct PlanResult {
  Mode mode = Mode::kRelay;
  std::optional<double> alpha_star;
  double snr_db_star = 0.0;
  double snr_db_star_relay = 0.0;
  double ee = 0.0;
  double delay = 0.0;
  bool feasible = true;
  std::vector<AmcPolicy> policy;  // one entry for direct, two for relay
};

/// Maximize relay-mode energy efficiency over the alpha grid and the common
/// SNR (relay SNR tied to the source SNR). With a delay budget, the search
/// is restricted to the delay-feasible SNR interval; throws InfeasibleError
/// (with the minimum achievable delay) when no grid point is feasible.
PlanResult optimize_relay(const ModelConfig& config,
                          std::optional<double> delay_budget = std::nullopt);

/// Same search for direct transmission (SNR only).
PlanResult optimize_direct(const ModelConfig& config,
                           std::optional<double> delay_budget = std::nullopt);

/// Best EE at one fixed alpha under an optional delay budget.
PlanResult optimize_relay_at_alpha(const ModelConfig& config, double alpha,
                                   std::optional<double> delay_budget = std::nullopt);

struct SwitchDecision {
  std::optional<double> threshold;  // D*: delay budget where the best mode flips
  Mode chosen = Mode::kDirect;      // best mode at the queried budget
  double ee_relay = 0.0;            // constrained optima at the queried budget
  double ee_direct = 0.0;
  double access_lhs = 0.0;          // a_AD
  double access_rhs_literal = 0.0;  // (a_AR + a_RD * alpha) / (1 + alpha)
  double access_rhs_mixture = 0.0;  // alpha * a_AR + (1 - alpha) * a_RD
};

/// Mode selection under a delay budget: compares the delay-constrained EE
/// optima of both modes and locates the budget where they cross (none when
/// one mode dominates over the whole searched range).
SwitchDecision switch_decision(const ModelConfig& config, double delay_budget, double alpha);

/// Policies of a solved plan; throws on infeasible plans.
std::vector<AmcPolicy> amc_policy(const PlanResult& plan);

struct EepResult {
  std::vector<double> interior;  // S*_1..S*_N
  double ee = 0.0;
  int sweeps = 0;
};

/// Energy-efficient partition: coordinate-wise golden-section over each
/// interior boundary, initialized at the minimum-SNR partition so every
/// sweep can only improve the EE. Runs at the config's (alpha, snr_db).
EepResult eep_boundaries(const ModelConfig& config);

}  // namespace relayee

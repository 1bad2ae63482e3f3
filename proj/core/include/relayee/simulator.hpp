#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "relayee/metrics.hpp"
#include "relayee/rng.hpp"

namespace relayee {

struct SimConfig {
  ModelConfig model;
  Mode mode = Mode::kRelay;
  double alpha = 0.5;
  double snr_db = 5.0;
  long slots = 1000000;
  long warmup = 10000;
  std::uint64_t seed = 12345;
  int batches = 20;
  std::string trace_path;  // optional per-slot trace CSV

  void validate() const;
};

SimConfig sim_config_from(const ModelConfig& model, Mode mode);

struct SimReport {
  Mode mode = Mode::kRelay;
  double alpha = 0.0;
  double snr_db = 0.0;
  long slots = 0;
  long warmup = 0;
  std::uint64_t seed = 0;

  // Whole-run counters; these satisfy the exact conservation identity
  // arrived = delivered + dropped + failed + in_system_at_end.
  long arrived = 0;
  long delivered = 0;
  long delivered_direct = 0;
  long delivered_relay = 0;
  long dropped_source_overflow = 0;
  long dropped_relay_overflow = 0;
  long failed_source_retx = 0;
  long failed_relay_retx = 0;
  long in_system_end = 0;

  // Post-warmup estimates.
  double drop_source = 0.0;   // overflow drops per arrival
  double drop_relay = 0.0;    // relay overflow per source departure
  double throughput = 0.0;    // delivered per slot
  double sojourn_mean = 0.0;  // time-units, arrival to correct decode
  long sojourn_count = 0;
  double energy_j = 0.0;
  double ee = 0.0;  // delivered per joule
  double avail_ar = 0.0, avail_rd = 0.0, avail_ad = 0.0;
  Eigen::MatrixXd occupancy_source;  // N x (M+1), sums to 1
  Eigen::MatrixXd occupancy_relay;

  // Batch-means 95% confidence half-widths.
  double hw_throughput = 0.0;
  double hw_ee = 0.0;
  double hw_drop_source = 0.0;
  double hw_sojourn = 0.0;
};

/// Discrete-time Monte-Carlo run; deterministic for a given seed.
SimReport run(const SimConfig& config);

struct ValidationTolerances {
  double ee_rel = 0.10;
  double throughput_rel = 0.10;
  double delay_rel = 0.15;
  double drop_rel = 0.10;
  double drop_abs_small = 0.02;   // absolute band when both sides are < small_cut
  double small_cut = 0.05;
  double occupancy_l1 = 0.05;
  double avail_abs = 0.01;
};

struct ValidationEntry {
  std::string metric;
  double analytic = 0.0;
  double simulated = 0.0;
  double gap = 0.0;  // the compared quantity (relative or absolute)
  double tol = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool pass = false;
};

/// Per-metric comparison of the closed-form results against pooled
/// simulation estimates. Run configurations must match the analytic point.
ValidationReport validate(const EvalDetail& analytic, const std::vector<SimReport>& sims,
                          const ValidationTolerances& tol = {});

}  // namespace relayee

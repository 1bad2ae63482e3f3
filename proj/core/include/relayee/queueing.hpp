#pragma once

#include <vector>

#include "relayee/channel.hpp"
#include "relayee/markov.hpp"

namespace relayee {

/// Arrival process at the source. `mean_rate` is the Poisson mean in
/// packets per time-unit; an optional Markov-modulated overlay (rates +
/// switch matrix) drives the simulator, while closed-form analysis uses the
/// stationary mixture mean.
struct TrafficModel {
  double mean_rate = 1.0;
  int max_arrivals = 15;
  std::vector<double> mmpp_rates;
  std::vector<std::vector<double>> mmpp_switch;

  bool has_mmpp() const { return !mmpp_rates.empty(); }
  /// Stationary mixture mean when modulated, else mean_rate.
  double effective_mean() const;
  /// Stationary distribution of the modulation chain.
  std::vector<double> mmpp_stationary() const;
  void validate() const;
};

/// Global link-layer parameters.
struct SystemParams {
  int packet_bits = 100;        // L
  double symbol_rate_hz = 1e5;  // R_s
  double slot_s = 3e-3;         // seconds per time-unit
  int buffer_capacity = 50;     // M; buffer levels are 0..M
  int max_tx = 6;               // N_r^max
  double ref_power_w = 1.0;     // constant transmit signal power e-bar
  double idle_power_w = 0.1;    // P_0
  double loss_budget = 1e-3;    // P_loss

  void validate() const;
};

/// Per-state transmission times for the relay-assisted broadcast, in
/// time-units. eps mixes the direct-delivery and relayed paths by the
/// direct-link failure probability; eps_bar is the state-averaged
/// retransmission time (identical for every state).
struct RelayTimes {
  std::vector<double> tau_direct;   // L/(b_n R_s a_AD), per state
  std::vector<double> tau_relayed;  // A->R leg plus mean-rate R->D leg
  std::vector<double> eps;
  double eps_bar = 0.0;
  double mean_bits_rd = 0.0;  // conditional mean modulation of the R->D link
};

/// Transmission and retransmission times for every channel state.
/// Throws when any involved link has zero spectrum availability.
RelayTimes packet_times(const LinkModel& ar, const LinkModel& rd, const LinkModel& ad,
                        const SystemParams& params, double p_ld);

/// Service-time distribution of one head-of-line packet under truncated
/// ARQ: outcome t = number of retransmissions before success, t = 0..max_tx.
/// The exhausted-retries event (probability p^(max_tx+1)) is folded into the
/// final support point so the pmf sums to 1; its probability is kept
/// separately and feeds the throughput loss term, not the service mean.
struct ServiceTimePmf {
  std::vector<double> times;
  std::vector<double> masses;
  double drop_probability = 0.0;
  double eps = 0.0;
  double eps_bar = 0.0;
  double p_err = 0.0;
  int max_tx = 0;

  /// Expected service time of the geometric attempt sequence (the closed
  /// form used by the service rates); excludes the exhausted-retries mass.
  double mean() const;
};

ServiceTimePmf service_time_pmf(double eps, double eps_bar, double p_err, int max_tx);

/// Closed-form mean of the truncated-geometric service time.
double expected_service_time(double eps, double eps_bar, double p_err, int max_tx);

/// Per-state service rates chi_n = phase_fraction / E{delta_n}.
struct ServiceProfile {
  std::vector<double> eps;  // first-attempt service time per state
  double eps_bar = 0.0;     // per-retransmission time
  double p_err = 0.0;       // per-attempt failure probability
  int max_tx = 0;
  double phase_fraction = 1.0;  // alpha, 1-alpha, or 1

  std::vector<double> rates() const;
  double rate(int state) const;  // 1-based state index
};

/// Source-side profile for relay-assisted transmission (Lemma-1 shape).
ServiceProfile source_profile(const RelayTimes& times, double p1, int max_tx, double alpha);

/// Relay-side profile (Lemma-2 shape): first attempt at the current R->D
/// mode, retransmissions at the mean-rate modulation.
ServiceProfile relay_profile(const LinkModel& rd, const SystemParams& params, double p_l2,
                             int max_tx, double alpha);

/// Direct transmission: the whole period serves the A->D link.
ServiceProfile direct_profile(const LinkModel& ad, const SystemParams& params, double p_ld,
                              int max_tx);

/// Truncated, renormalized Poisson pmf on {0..max_arrivals}.
std::vector<double> arrival_pmf(const TrafficModel& traffic);

/// Arrival pmf seen by the relay buffer: per-slot departures of the solved
/// source queue. Mean equals the effective source departure rate.
std::vector<double> relay_arrival_pmf(const JointChain& source_chain,
                                      const StationaryDistribution& source_pi);

/// The literal hybrid form (per-state rate atoms over a Poisson background,
/// renormalized); kept behind the relay_arrivals = paper-hybrid flag.
std::vector<double> relay_arrival_pmf_hybrid(const std::vector<double>& service_rates,
                                             const std::vector<double>& state_weights,
                                             const TrafficModel& traffic, double t_slot);

double pmf_mean(const std::vector<double>& pmf);

}  // namespace relayee

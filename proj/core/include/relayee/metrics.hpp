#pragma once

#include <optional>
#include <vector>

#include "relayee/config.hpp"
#include "relayee/markov.hpp"
#include "relayee/queueing.hpp"

namespace relayee {

enum class Mode { kRelay, kDirect };

const char* to_string(Mode mode);

/// Closed-form performance of one operating point.
struct LinkMetrics {
  Mode mode = Mode::kRelay;
  double alpha = 0.0;           // meaningless for direct transmission
  double snr_db = 0.0;
  double drop_source = 0.0;     // P^A_d
  double drop_relay = 0.0;      // P^R_d (0 for direct)
  double qlen_source = 0.0;     // packets
  double qlen_relay = 0.0;
  double delay = 0.0;           // time-units
  double throughput = 0.0;      // packets per time-unit
  double tx_power_source = 0.0; // W (nominal, averaged over fading)
  double tx_power_relay = 0.0;
  double tx_power_direct = 0.0;
  double power_total = 0.0;     // W, occupied-airtime model (plot quantity)
  double energy_per_period = 0.0;  // J per slot, per the configured energy form
  double ee = 0.0;              // packets per joule
  double p_ld = 0.0, p_l1 = 0.0, p_l2 = 0.0, p0 = 0.0;
  double lambda_eff = 0.0;
  double util_source = 0.0;     // server utilizations (busy-weighted energy)
  double util_relay = 0.0;
};

// --- drop rate, queue length, delay ------------------------------------------

/// Expected overflow per slot divided by the mean arrival rate.
double drop_rate(const Eigen::VectorXd& pi, const JointChain& chain,
                 const std::vector<double>& arrival_pmf);

/// Unnormalized per-state queue-length contribution sum_q pi(x, q) * q.
std::vector<double> avg_queue_length(const Eigen::VectorXd& pi, const JointChain& chain);

// --- throughput ---------------------------------------------------------------

double throughput_relay(double lambda, double drop_src, double drop_relay, double p0,
                        int max_tx);
double throughput_direct(double lambda, double drop_src, double p_ld, int max_tx,
                         ModelFlags::DirectThroughput form);

// --- power and energy ---------------------------------------------------------

/// Bit error rate equivalent to an L-bit packet error rate.
double ber_from_per(double per, int packet_bits);

/// Transmit power needed at SNR s to hit the BER target (0 when the target
/// is 0.2 or looser).
double power_at(double s, const AmcMode& mode, double ber_target, double ref_power);

/// Average transmit power of mode n over its interval, conditioned on the
/// channel being in state n.
double mode_power(int n, const AmcModeTable& amc, const FadingModel& fading, double ber_target,
                  double ref_power);

struct LinkPower {
  std::vector<double> ber_targets;    // per mode, from the interval-average PER
  std::vector<double> per_mode_w;     // conditional mode averages
  double avg_w = 0.0;                 // sum_n mode_power * Pr(n)
  double active_w = 0.0;              // mean power while transmitting (censored)
};

LinkPower link_power(const LinkModel& link, const SystemParams& params);

/// Energy of one transmission period split across the two phases.
double total_energy_relay(double p_source, double p_relay, const SpectrumAccess& ar,
                          const SpectrumAccess& rd, double alpha, double period_s,
                          double idle_power);
double total_energy_direct(double p_direct, const SpectrumAccess& ad, double period_s,
                           double idle_power);

/// Delivered packets per joule.
double energy_efficiency(double throughput, double energy_j, double period_units = 1.0);

// --- full pipeline -------------------------------------------------------------

/// Everything computed on the way to LinkMetrics; kept for tests, debug
/// dumps and the simulator validation.
struct EvalDetail {
  LinkMetrics metrics;
  LinkModel ar, rd, ad;
  std::vector<double> state_probs_ar, state_probs_rd, state_probs_ad;
  ServiceProfile source, relay;
  std::vector<double> source_rates, relay_rates;
  std::vector<double> source_arrivals, relay_arrivals;
  JointChain source_chain, relay_chain;
  StationaryDistribution source_pi, relay_pi;
  LinkPower power_ar, power_rd, power_ad;
  RelayTimes times;
  double mean_delta = 0.0;  // E{delta_n} averaged over usable states
};

EvalDetail evaluate_relay(const ModelConfig& config, double alpha, double snr_db);
EvalDetail evaluate_direct(const ModelConfig& config, double snr_db);

/// Dispatch on mode; alpha is ignored for direct transmission.
EvalDetail evaluate(const ModelConfig& config, Mode mode, double alpha, double snr_db);

}  // namespace relayee

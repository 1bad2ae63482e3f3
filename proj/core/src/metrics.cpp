#include "relayee/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "relayee/quadrature.hpp"

namespace relayee {

const char* to_string(Mode mode) { return mode == Mode::kRelay ? "relay" : "direct"; }

double drop_rate(const Eigen::VectorXd& pi, const JointChain& chain,
                 const std::vector<double>& arrivals) {
  const double mean_arrivals = pmf_mean(arrivals);
  if (!(mean_arrivals > 0.0)) {
    throw ModelError("drop rate undefined: mean arrival rate is zero");
  }
  const int m = chain.capacity();
  double dropped = 0.0;
  for (int x = 0; x < chain.num_service_states; ++x) {
    for (int q = 0; q < chain.buffer_levels; ++q) {
      const double p = pi(chain.index(x, q));
      if (p == 0.0) continue;
      for (const auto& [c, pc] : chain.service[x].atoms) {
        const int space = m - std::max(0, q - c);
        for (int a = space + 1; a < static_cast<int>(arrivals.size()); ++a) {
          dropped += p * pc * arrivals[a] * (a - space);
        }
      }
    }
  }
  return std::clamp(dropped / mean_arrivals, 0.0, 1.0);
}

std::vector<double> avg_queue_length(const Eigen::VectorXd& pi, const JointChain& chain) {
  std::vector<double> q_bar(chain.num_service_states, 0.0);
  for (int x = 0; x < chain.num_service_states; ++x) {
    for (int q = 0; q < chain.buffer_levels; ++q) {
      q_bar[x] += pi(chain.index(x, q)) * q;
    }
  }
  return q_bar;
}

double throughput_relay(double lambda, double drop_src, double drop_relay, double p0,
                        int max_tx) {
  return lambda * (1.0 - drop_src) * (1.0 - drop_relay) * (1.0 - std::pow(p0, max_tx));
}

double throughput_direct(double lambda, double drop_src, double p_ld, int max_tx,
                         ModelFlags::DirectThroughput form) {
  const double fail = form == ModelFlags::DirectThroughput::kConsistent
                          ? std::pow(p_ld, max_tx)
                          : std::pow(1.0 - p_ld, max_tx);
  return lambda * (1.0 - drop_src) * (1.0 - fail);
}

double ber_from_per(double per, int packet_bits) {
  per = std::clamp(per, 0.0, 1.0);
  if (per >= 1.0) return 1.0;
  return -std::expm1(std::log1p(-per) / packet_bits);
}

double power_at(double s, const AmcMode& mode, double ber_target, double ref_power) {
  if (ber_target >= 0.2) return 0.0;  // the BER model cannot demand less than 0.2
  if (!(s > 0.0)) throw InvalidParameterError("power_at needs positive SNR");
  const double theta = std::max(ber_target, 1e-300);
  return ref_power * (std::exp2(mode.bits_per_symbol) - 1.0) / (1.5 * s) *
         std::log(0.2 / theta);
}

double mode_power(int n, const AmcModeTable& amc, const FadingModel& fading, double ber_target,
                  double ref_power) {
  if (n < 1 || n > amc.num_modes()) throw InvalidParameterError("mode index out of range");
  if (ber_target >= 0.2) return 0.0;
  const double lo = amc.boundaries[n];
  const double hi = amc.boundaries[n + 1];
  const AmcMode& mode = amc.modes[n - 1];
  const double mass = interval_mass(lo, hi, fading);
  if (mass <= 0.0) return 0.0;
  // The 1/s integrand is stiff near small boundaries; keep away from 0.
  const double eps = std::max(lo, 1e-12);
  double integral = integrate(
      [&](double s) { return power_at(s, mode, ber_target, ref_power) * gamma_pdf(s, fading); },
      eps, hi);
  return integral / mass;
}

LinkPower link_power(const LinkModel& link, const SystemParams& params) {
  LinkPower power;
  const auto prob = state_probabilities(link.amc, link.fading);
  const int n_modes = link.amc.num_modes();
  power.ber_targets.resize(n_modes);
  power.per_mode_w.resize(n_modes);
  double usable = 0.0;
  for (int n = 1; n <= n_modes; ++n) {
    const double per = mode_avg_per(n, link.amc, link.fading);
    power.ber_targets[n - 1] = ber_from_per(per, params.packet_bits);
    power.per_mode_w[n - 1] =
        mode_power(n, link.amc, link.fading, power.ber_targets[n - 1], params.ref_power_w);
    power.avg_w += power.per_mode_w[n - 1] * prob[n];
    usable += prob[n];
  }
  power.active_w = usable > 0.0 ? power.avg_w / usable : 0.0;
  return power;
}

double total_energy_relay(double p_source, double p_relay, const SpectrumAccess& ar,
                          const SpectrumAccess& rd, double alpha, double period_s,
                          double idle_power) {
  return (ar.avail() * p_source + ar.unavail() * idle_power) * alpha * period_s +
         (rd.avail() * p_relay + rd.unavail() * idle_power) * (1.0 - alpha) * period_s;
}

double total_energy_direct(double p_direct, const SpectrumAccess& ad, double period_s,
                           double idle_power) {
  return (ad.avail() * p_direct + ad.unavail() * idle_power) * period_s;
}

double energy_efficiency(double throughput, double energy_j, double period_units) {
  if (!(energy_j > 0.0)) throw ModelError("energy efficiency undefined: zero energy");
  return period_units * throughput / energy_j;
}

namespace {

// Rate-weighted link PER with the state weights taken from `weight_link`
// (used by the l1_weighting = direct variant).
double avg_link_per_weighted(const LinkModel& link, const LinkModel& weight_link) {
  const auto prob = state_probabilities(weight_link.amc, weight_link.fading);
  double num = 0.0;
  double den = 0.0;
  for (int n = 1; n <= link.amc.num_modes(); ++n) {
    const double w = link.amc.modes[n - 1].bits_per_symbol * prob[n];
    den += w;
    if (w > 0.0) num += w * mode_avg_per(n, link.amc, link.fading);
  }
  if (den <= 0.0) throw ModelError("degenerate channel: weighting link always in outage");
  return std::clamp(num / den, 0.0, 1.0);
}

std::vector<double> censored_weights(const std::vector<double>& probs) {
  double usable = 0.0;
  for (std::size_t n = 1; n < probs.size(); ++n) usable += probs[n];
  if (usable <= 0.0) throw ModelError("degenerate channel: always in outage");
  std::vector<double> w(probs.size() - 1);
  for (std::size_t n = 1; n < probs.size(); ++n) w[n - 1] = probs[n] / usable;
  return w;
}

double server_utilization(double served_rate, const std::vector<double>& rates,
                          const std::vector<double>& weights) {
  double capacity = 0.0;
  for (std::size_t n = 0; n < rates.size(); ++n) capacity += weights[n] * rates[n];
  if (!(capacity > 0.0)) return 1.0;
  return std::clamp(served_rate / capacity, 0.0, 1.0);
}

}  // namespace

EvalDetail evaluate_relay(const ModelConfig& config, double alpha, double snr_db) {
  config.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameterError("time allocation ratio must lie in (0, 1)");
  }
  EvalDetail d;
  d.ar = config.make_link(LinkLabel::kSourceRelay, snr_db);
  d.rd = config.make_link(LinkLabel::kRelayDest, snr_db);
  d.ad = config.make_link(LinkLabel::kDirect, snr_db);
  const SystemParams& sys = config.system;

  d.state_probs_ar = state_probabilities(d.ar.amc, d.ar.fading);
  d.state_probs_rd = state_probabilities(d.rd.amc, d.rd.fading);
  d.state_probs_ad = state_probabilities(d.ad.amc, d.ad.fading);

  const double p_ld = avg_link_per(d.ad);
  const double p_l1 = config.flags.l1_weighting == ModelFlags::L1Weighting::kInterNode
                          ? avg_link_per(d.ar)
                          : avg_link_per_weighted(d.ar, d.ad);
  const double p_l2 = avg_link_per(d.rd);
  const CombinedError comb = combined_error(p_ld, p_l1, p_l2);

  d.times = packet_times(d.ar, d.rd, d.ad, sys, p_ld);
  d.source = source_profile(d.times, comb.p1, sys.max_tx, alpha);
  d.relay = relay_profile(d.rd, sys, p_l2, sys.max_tx, alpha);
  d.source_rates = d.source.rates();
  d.relay_rates = d.relay.rates();

  d.source_arrivals = arrival_pmf(config.traffic);
  const double lambda = config.traffic.effective_mean();

  d.source_chain = build_chain(d.source_arrivals, d.source_rates,
                               slot_transition_matrix(d.ar, sys.slot_s), sys.buffer_capacity);
  d.source_pi = stationary(d.source_chain);
  const double drop_src = drop_rate(d.source_pi.pi, d.source_chain, d.source_arrivals);

  if (config.flags.relay_arrivals == ModelFlags::RelayArrivals::kQuantized) {
    d.relay_arrivals = relay_arrival_pmf(d.source_chain, d.source_pi);
  } else {
    d.relay_arrivals = relay_arrival_pmf_hybrid(
        d.source_rates, censored_weights(d.state_probs_ar), config.traffic, 1.0);
  }
  d.relay_chain = build_chain(d.relay_arrivals, d.relay_rates,
                              slot_transition_matrix(d.rd, sys.slot_s), sys.buffer_capacity);
  d.relay_pi = stationary(d.relay_chain);
  const double drop_rly = drop_rate(d.relay_pi.pi, d.relay_chain, d.relay_arrivals);

  LinkMetrics& m = d.metrics;
  m.mode = Mode::kRelay;
  m.alpha = alpha;
  m.snr_db = snr_db;
  m.p_ld = p_ld;
  m.p_l1 = p_l1;
  m.p_l2 = p_l2;
  m.p0 = comb.p0;
  m.drop_source = drop_src;
  m.drop_relay = drop_rly;
  m.throughput = throughput_relay(lambda, drop_src, drop_rly, comb.p0, sys.max_tx);
  m.lambda_eff = config.flags.little_rate == ModelFlags::LittleRate::kAccepted
                     ? lambda * (1.0 - drop_src)
                     : lambda;

  const auto q_src = avg_queue_length(d.source_pi.pi, d.source_chain);
  const auto q_rly = avg_queue_length(d.relay_pi.pi, d.relay_chain);
  for (double q : q_src) m.qlen_source += q;
  for (double q : q_rly) m.qlen_relay += q;

  // chi-bar weighted by the raw state probabilities, as in the delay formula.
  double chi_bar = 0.0;
  for (int n = 1; n <= config.amc.num_modes(); ++n) {
    chi_bar += d.state_probs_ar[n] * d.source_rates[n - 1];
  }
  const auto w_ar = censored_weights(d.state_probs_ar);
  std::vector<double> delta(d.source_rates.size());
  for (std::size_t n = 0; n < delta.size(); ++n) {
    delta[n] = expected_service_time(d.source.eps[n], d.source.eps_bar, d.source.p_err,
                                     d.source.max_tx);
    d.mean_delta += w_ar[n] * delta[n];
  }
  if (config.flags.delay_form == ModelFlags::DelayForm::kPaperLiteral) {
    double total = 0.0;
    for (int n = 1; n <= config.amc.num_modes(); ++n) {
      const double d_n = q_src[n - 1] / m.lambda_eff + q_rly[n - 1] / chi_bar + delta[n - 1];
      total += d.state_probs_ar[n] * d_n;
    }
    m.delay = total;
  } else {
    const double relay_through = m.lambda_eff * (1.0 - drop_rly);
    m.delay = m.qlen_source / m.lambda_eff +
              (relay_through > 0.0 ? m.qlen_relay / relay_through : 0.0) + d.mean_delta;
  }

  d.power_ar = link_power(d.ar, sys);
  d.power_rd = link_power(d.rd, sys);
  d.power_ad = link_power(d.ad, sys);
  m.tx_power_source = d.power_ar.avg_w;
  m.tx_power_relay = d.power_rd.avg_w;
  m.tx_power_direct = d.power_ad.avg_w;

  const SpectrumAccess acc_ar{config.access_ar.q, config.access_ar.u};
  const SpectrumAccess acc_rd{config.access_rd.q, config.access_rd.u};
  const double nominal_energy =
      total_energy_relay(m.tx_power_source, m.tx_power_relay, acc_ar, acc_rd, alpha,
                         sys.slot_s, sys.idle_power_w);
  m.power_total = nominal_energy / sys.slot_s;

  m.util_source = server_utilization(m.lambda_eff, d.source_rates, w_ar);
  m.util_relay = server_utilization(m.lambda_eff * (1.0 - drop_rly), d.relay_rates,
                                    censored_weights(d.state_probs_rd));
  if (config.flags.energy_form == ModelFlags::EnergyForm::kBusyWeighted) {
    const double p1 = m.util_source * d.power_ar.active_w +
                      (1.0 - m.util_source) * sys.idle_power_w;
    const double p2 = m.util_relay * d.power_rd.active_w +
                      (1.0 - m.util_relay) * sys.idle_power_w;
    m.energy_per_period =
        total_energy_relay(p1, p2, acc_ar, acc_rd, alpha, sys.slot_s, sys.idle_power_w);
  } else {
    m.energy_per_period = nominal_energy;
  }
  m.ee = energy_efficiency(m.throughput, m.energy_per_period);
  return d;
}

EvalDetail evaluate_direct(const ModelConfig& config, double snr_db) {
  config.validate();
  EvalDetail d;
  d.ad = config.make_link(LinkLabel::kDirect, snr_db);
  const SystemParams& sys = config.system;
  d.state_probs_ad = state_probabilities(d.ad.amc, d.ad.fading);

  const double p_ld = avg_link_per(d.ad);
  d.source = direct_profile(d.ad, sys, p_ld, sys.max_tx);
  d.source_rates = d.source.rates();
  d.source_arrivals = arrival_pmf(config.traffic);
  const double lambda = config.traffic.effective_mean();

  d.source_chain = build_chain(d.source_arrivals, d.source_rates,
                               slot_transition_matrix(d.ad, sys.slot_s), sys.buffer_capacity);
  d.source_pi = stationary(d.source_chain);
  const double drop_src = drop_rate(d.source_pi.pi, d.source_chain, d.source_arrivals);

  LinkMetrics& m = d.metrics;
  m.mode = Mode::kDirect;
  m.alpha = 0.0;
  m.snr_db = snr_db;
  m.p_ld = p_ld;
  m.drop_source = drop_src;
  m.throughput =
      throughput_direct(lambda, drop_src, p_ld, sys.max_tx, config.flags.direct_throughput);
  m.lambda_eff = config.flags.little_rate == ModelFlags::LittleRate::kAccepted
                     ? lambda * (1.0 - drop_src)
                     : lambda;

  const auto q_src = avg_queue_length(d.source_pi.pi, d.source_chain);
  for (double q : q_src) m.qlen_source += q;

  const auto w_ad = censored_weights(d.state_probs_ad);
  std::vector<double> delta(d.source_rates.size());
  for (std::size_t n = 0; n < delta.size(); ++n) {
    delta[n] = expected_service_time(d.source.eps[n], d.source.eps_bar, d.source.p_err,
                                     d.source.max_tx);
    d.mean_delta += w_ad[n] * delta[n];
  }
  if (config.flags.delay_form == ModelFlags::DelayForm::kPaperLiteral) {
    double total = 0.0;
    for (int n = 1; n <= config.amc.num_modes(); ++n) {
      total += d.state_probs_ad[n] * (q_src[n - 1] / m.lambda_eff + delta[n - 1]);
    }
    m.delay = total;
  } else {
    m.delay = m.qlen_source / m.lambda_eff + d.mean_delta;
  }

  d.power_ad = link_power(d.ad, sys);
  m.tx_power_direct = d.power_ad.avg_w;
  const SpectrumAccess acc_ad{config.access_ad.q, config.access_ad.u};
  const double nominal_energy =
      total_energy_direct(m.tx_power_direct, acc_ad, sys.slot_s, sys.idle_power_w);
  m.power_total = nominal_energy / sys.slot_s;

  m.util_source = server_utilization(m.lambda_eff, d.source_rates, w_ad);
  if (config.flags.energy_form == ModelFlags::EnergyForm::kBusyWeighted) {
    const double p = m.util_source * d.power_ad.active_w +
                     (1.0 - m.util_source) * sys.idle_power_w;
    m.energy_per_period = total_energy_direct(p, acc_ad, sys.slot_s, sys.idle_power_w);
  } else {
    m.energy_per_period = nominal_energy;
  }
  m.ee = energy_efficiency(m.throughput, m.energy_per_period);
  return d;
}

EvalDetail evaluate(const ModelConfig& config, Mode mode, double alpha, double snr_db) {
  return mode == Mode::kRelay ? evaluate_relay(config, alpha, snr_db)
                              : evaluate_direct(config, snr_db);
}

}  // namespace relayee

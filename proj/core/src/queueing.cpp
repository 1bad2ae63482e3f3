#include "relayee/queueing.hpp"

#include <cmath>

namespace relayee {

namespace {

// Conditional state weights given a transmission state (n >= 1).
std::vector<double> usable_weights(const LinkModel& link) {
  auto prob = state_probabilities(link.amc, link.fading);
  double total = 0.0;
  for (std::size_t n = 1; n < prob.size(); ++n) total += prob[n];
  if (total <= 0.0) {
    throw ModelError("degenerate channel: link " + to_string(link.label) +
                     " is always in the outage state");
  }
  std::vector<double> w(prob.size() - 1);
  for (std::size_t n = 1; n < prob.size(); ++n) w[n - 1] = prob[n] / total;
  return w;
}

double require_avail(const LinkModel& link) {
  double a = link.access.avail();
  if (!(a > 0.0)) {
    throw ModelError("starved link " + to_string(link.label) + ": zero spectrum availability");
  }
  return a;
}

}  // namespace

double TrafficModel::effective_mean() const {
  if (!has_mmpp()) return mean_rate;
  auto pi = mmpp_stationary();
  double mean = 0.0;
  for (std::size_t k = 0; k < mmpp_rates.size(); ++k) mean += pi[k] * mmpp_rates[k];
  return mean;
}

std::vector<double> TrafficModel::mmpp_stationary() const {
  const std::size_t k = mmpp_rates.size();
  if (k == 0) return {};
  if (k == 1) return {1.0};
  // Small K: solve by long-run averaging of the switch matrix.
  std::vector<double> pi(k, 1.0 / k);
  for (int iter = 0; iter < 100000; ++iter) {
    std::vector<double> next(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) next[j] += pi[i] * mmpp_switch[i][j];
    }
    double delta = 0.0;
    for (std::size_t j = 0; j < k; ++j) delta = std::max(delta, std::abs(next[j] - pi[j]));
    pi = std::move(next);
    if (delta < 1e-15) break;
  }
  return pi;
}

void TrafficModel::validate() const {
  if (!(effective_mean() > 0.0)) throw InvalidParameterError("arrival rate must be positive");
  if (max_arrivals < 1) throw InvalidParameterError("max_arrivals must be at least 1");
  if (has_mmpp()) {
    if (mmpp_switch.size() != mmpp_rates.size()) {
      throw InvalidParameterError("mmpp switch matrix must be K x K");
    }
    for (const auto& row : mmpp_switch) {
      if (row.size() != mmpp_rates.size()) {
        throw InvalidParameterError("mmpp switch matrix must be K x K");
      }
      double sum = 0.0;
      for (double v : row) {
        if (v < 0.0) throw InvalidParameterError("mmpp switch entries must be nonnegative");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidParameterError("mmpp switch rows must sum to 1");
      }
    }
    for (double r : mmpp_rates) {
      if (!(r > 0.0)) throw InvalidParameterError("mmpp rates must be positive");
    }
  }
}

void SystemParams::validate() const {
  if (packet_bits <= 0) throw InvalidParameterError("packet_bits must be positive");
  if (!(symbol_rate_hz > 0.0)) throw InvalidParameterError("symbol_rate_hz must be positive");
  if (!(slot_s > 0.0)) throw InvalidParameterError("slot_s must be positive");
  if (buffer_capacity < 0) throw InvalidParameterError("buffer size must be nonnegative");
  if (max_tx < 1) throw InvalidParameterError("max_tx must be at least 1");
  if (!(ref_power_w > 0.0)) throw InvalidParameterError("ref_power_w must be positive");
  if (idle_power_w < 0.0) throw InvalidParameterError("idle_power_w must be nonnegative");
  if (!(loss_budget > 0.0 && loss_budget < 1.0)) {
    throw InvalidParameterError("loss_budget must lie in (0, 1)");
  }
}

RelayTimes packet_times(const LinkModel& ar, const LinkModel& rd, const LinkModel& ad,
                        const SystemParams& params, double p_ld) {
  params.validate();
  const double a_ar = require_avail(ar);
  const double a_rd = require_avail(rd);
  const double a_ad = require_avail(ad);
  const double bits_per_slot = params.symbol_rate_hz * params.slot_s;

  const auto w_ar = usable_weights(ar);
  const auto w_ad = usable_weights(ad);
  const auto w_rd = usable_weights(rd);
  const int n_modes = ar.amc.num_modes();

  double mean_bits_rd = 0.0;
  for (int n = 0; n < n_modes; ++n) mean_bits_rd += w_rd[n] * rd.amc.modes[n].bits_per_symbol;

  RelayTimes t;
  t.mean_bits_rd = mean_bits_rd;
  t.tau_direct.resize(n_modes);
  t.tau_relayed.resize(n_modes);
  t.eps.resize(n_modes);
  const double l = params.packet_bits;
  const double rd_leg = l / (mean_bits_rd * bits_per_slot * a_rd);
  for (int n = 0; n < n_modes; ++n) {
    const double b = ar.amc.modes[n].bits_per_symbol;
    t.tau_direct[n] = l / (b * bits_per_slot * a_ad);
    t.tau_relayed[n] = l / (b * bits_per_slot * a_ar) + rd_leg;
    t.eps[n] = t.tau_direct[n] * (1.0 - p_ld) + t.tau_relayed[n] * p_ld;
  }
  double tau_direct_mean = 0.0;
  double tau_relayed_mean = 0.0;
  for (int n = 0; n < n_modes; ++n) {
    tau_direct_mean += w_ad[n] * t.tau_direct[n];
    tau_relayed_mean += w_ar[n] * t.tau_relayed[n];
  }
  t.eps_bar = tau_direct_mean * (1.0 - p_ld) + tau_relayed_mean * p_ld;
  return t;
}

ServiceTimePmf service_time_pmf(double eps, double eps_bar, double p_err, int max_tx) {
  if (!(p_err >= 0.0) || p_err >= 1.0) {
    throw ModelError("service never succeeds: per-attempt error probability must be < 1");
  }
  ServiceTimePmf pmf;
  pmf.eps = eps;
  pmf.eps_bar = eps_bar;
  pmf.p_err = p_err;
  pmf.max_tx = max_tx;
  pmf.times.resize(max_tx + 1);
  pmf.masses.resize(max_tx + 1);
  double geom = 1.0;  // p^t
  for (int t = 0; t <= max_tx; ++t) {
    pmf.times[t] = eps + t * eps_bar;
    pmf.masses[t] = (1.0 - p_err) * geom;
    geom *= p_err;
  }
  pmf.drop_probability = geom;  // p^(max_tx+1)
  pmf.masses[max_tx] += geom;   // fold the exhausted-retries event
  return pmf;
}

double ServiceTimePmf::mean() const {
  double m = 0.0;
  double geom = 1.0;
  for (int t = 0; t <= max_tx; ++t) {
    m += times[t] * (1.0 - p_err) * geom;
    geom *= p_err;
  }
  return m;
}

double expected_service_time(double eps, double eps_bar, double p_err, int max_tx) {
  if (!(p_err >= 0.0) || p_err > 1.0 - 1e-12) {
    throw ModelError("service time diverges: per-attempt error probability too close to 1");
  }
  const double p = p_err;
  const int k = max_tx;
  const double f = eps * (1.0 - std::pow(p, k + 1)) * (1.0 - p);
  const double retr = eps_bar * p * (1.0 - std::pow(p, k) * (1.0 + k * (1.0 - p)));
  return (f + retr) / (1.0 - p);
}

std::vector<double> ServiceProfile::rates() const {
  std::vector<double> chi(eps.size());
  for (std::size_t n = 0; n < eps.size(); ++n) {
    chi[n] = phase_fraction / expected_service_time(eps[n], eps_bar, p_err, max_tx);
  }
  return chi;
}

double ServiceProfile::rate(int state) const {
  return phase_fraction / expected_service_time(eps.at(state - 1), eps_bar, p_err, max_tx);
}

ServiceProfile source_profile(const RelayTimes& times, double p1, int max_tx, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameterError("time allocation ratio must lie in (0, 1)");
  }
  ServiceProfile profile;
  profile.eps = times.eps;
  profile.eps_bar = times.eps_bar;
  profile.p_err = p1;
  profile.max_tx = max_tx;
  profile.phase_fraction = alpha;
  return profile;
}

ServiceProfile relay_profile(const LinkModel& rd, const SystemParams& params, double p_l2,
                             int max_tx, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameterError("time allocation ratio must lie in (0, 1)");
  }
  const double a_rd = require_avail(rd);
  const double bits_per_slot = params.symbol_rate_hz * params.slot_s;
  const auto w = usable_weights(rd);
  double mean_bits = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) mean_bits += w[n] * rd.amc.modes[n].bits_per_symbol;

  ServiceProfile profile;
  profile.eps.resize(rd.amc.num_modes());
  for (int n = 0; n < rd.amc.num_modes(); ++n) {
    profile.eps[n] = params.packet_bits /
                     (rd.amc.modes[n].bits_per_symbol * bits_per_slot * a_rd);
  }
  profile.eps_bar = params.packet_bits / (mean_bits * bits_per_slot * a_rd);
  profile.p_err = p_l2;
  profile.max_tx = max_tx;
  profile.phase_fraction = 1.0 - alpha;
  return profile;
}

ServiceProfile direct_profile(const LinkModel& ad, const SystemParams& params, double p_ld,
                              int max_tx) {
  const double a_ad = require_avail(ad);
  const double bits_per_slot = params.symbol_rate_hz * params.slot_s;
  const auto w = usable_weights(ad);

  ServiceProfile profile;
  profile.eps.resize(ad.amc.num_modes());
  double eps_bar = 0.0;
  for (int n = 0; n < ad.amc.num_modes(); ++n) {
    profile.eps[n] = params.packet_bits /
                     (ad.amc.modes[n].bits_per_symbol * bits_per_slot * a_ad);
    eps_bar += w[n] * profile.eps[n];
  }
  profile.eps_bar = eps_bar;
  profile.p_err = p_ld;
  profile.max_tx = max_tx;
  profile.phase_fraction = 1.0;
  return profile;
}

std::vector<double> arrival_pmf(const TrafficModel& traffic) {
  traffic.validate();
  const double lambda = traffic.effective_mean();
  const int a_max = traffic.max_arrivals;
  std::vector<double> pmf(a_max + 1);
  double mass = std::exp(-lambda);
  double total = 0.0;
  for (int a = 0; a <= a_max; ++a) {
    pmf[a] = mass;
    total += mass;
    mass *= lambda / (a + 1);
  }
  for (double& p : pmf) p /= total;
  return pmf;
}

std::vector<double> relay_arrival_pmf(const JointChain& source_chain,
                                      const StationaryDistribution& source_pi) {
  if (source_pi.pi.size() != source_chain.size()) {
    throw ModelError("source chain must be solved before deriving relay arrivals");
  }
  return departure_pmf(source_chain, source_pi.pi);
}

std::vector<double> relay_arrival_pmf_hybrid(const std::vector<double>& service_rates,
                                             const std::vector<double>& state_weights,
                                             const TrafficModel& traffic, double t_slot) {
  if (service_rates.size() != state_weights.size()) {
    throw InvalidParameterError("service rates and state weights must align");
  }
  const double lambda = traffic.effective_mean();
  std::vector<double> pmf(traffic.max_arrivals + 1, 0.0);
  std::vector<bool> atom(pmf.size(), false);
  for (std::size_t n = 0; n < service_rates.size(); ++n) {
    auto counts = quantize_service(service_rates[n], t_slot, traffic.max_arrivals);
    for (const auto& [c, pc] : counts.atoms) {
      pmf[c] += state_weights[n] * pc;
      atom[c] = true;
    }
  }
  double mass = std::exp(-lambda);
  for (std::size_t a = 0; a < pmf.size(); ++a) {
    if (!atom[a]) pmf[a] += mass;
    mass *= lambda / (a + 1);
  }
  double total = 0.0;
  for (double p : pmf) total += p;
  for (double& p : pmf) p /= total;
  return pmf;
}

double pmf_mean(const std::vector<double>& pmf) {
  double mean = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) mean += k * pmf[k];
  return mean;
}

}  // namespace relayee

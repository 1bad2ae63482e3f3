#include "relayee/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>

namespace relayee {

void SimConfig::validate() const {
  model.validate();
  if (slots <= warmup || warmup < 0) throw InvalidParameterError("need slots > warmup >= 0");
  if (batches < 2) throw InvalidParameterError("need at least 2 batches");
  if (mode == Mode::kRelay && !(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameterError("time allocation ratio must lie in (0, 1)");
  }
}

SimConfig sim_config_from(const ModelConfig& model, Mode mode) {
  SimConfig config;
  config.model = model;
  config.mode = mode;
  config.alpha = model.alpha;
  config.snr_db = model.snr_db;
  config.slots = model.simulate.slots;
  config.warmup = model.simulate.warmup;
  config.seed = model.simulate.seed;
  config.batches = model.simulate.batches;
  return config;
}

namespace {

constexpr int kBandAR = 0;
constexpr int kBandRD = 1;
constexpr int kBandAD = 2;

// One link's channel process: censored slow-fading state chain plus
// conditional SNR sampling within the current state's interval.
struct ChannelProcess {
  const LinkModel* link = nullptr;
  Eigen::MatrixXd step;            // censored, N x N
  std::vector<double> cdf_at;      // gamma cdf at each boundary
  std::vector<double> ber_target;  // per mode
  int state = 1;                   // 1-based mode index
  double snr = 1.0;
  double power_w = 0.0;

  void init(const LinkModel& l, const SystemParams& sys, double slot_s) {
    link = &l;
    step = slot_transition_matrix(l, slot_s);
    cdf_at.resize(l.amc.boundaries.size());
    for (std::size_t i = 0; i < cdf_at.size(); ++i) {
      cdf_at[i] = gamma_cdf(l.amc.boundaries[i], l.fading);
    }
    ber_target.resize(l.amc.num_modes());
    for (int n = 1; n <= l.amc.num_modes(); ++n) {
      ber_target[n - 1] =
          ber_from_per(mode_avg_per(n, l.amc, l.fading), sys.packet_bits);
    }
    // Start from the conditional stationary state: pick the most likely.
    const auto prob = state_probabilities(l.amc, l.fading);
    state = 1;
    for (int n = 2; n <= l.amc.num_modes(); ++n) {
      if (prob[n] > prob[state]) state = n;
    }
  }

  void advance(Philox& fading_rng, Philox& snr_rng, const SystemParams& sys) {
    double u = fading_rng.uniform();
    double acc = 0.0;
    int next = state;
    for (int y = 0; y < static_cast<int>(step.cols()); ++y) {
      acc += step(state - 1, y);
      if (u < acc) {
        next = y + 1;
        break;
      }
    }
    state = next;
    // SNR conditioned on the state's interval.
    const double lo = cdf_at[state];
    const double hi = cdf_at[state + 1];
    double p = lo + (hi - lo) * snr_rng.uniform();
    p = std::min(p, 1.0 - 1e-15);
    snr = gamma_quantile(p, link->fading);
    snr = std::max(snr, 1e-12);
    power_w = power_at(snr, link->amc.modes[state - 1], ber_target[state - 1],
                       sys.ref_power_w);
  }

  double per() const { return per_at(snr, link->amc.modes[state - 1]); }
  int bits() const { return link->amc.modes[state - 1].bits_per_symbol; }
};

struct Occupancy {
  double avail_prob_on;   // unavailable -> available per slot
  double avail_prob_off;  // available -> unavailable per slot
  bool available = true;

  void init(const SpectrumAccess& access, Philox& rng) {
    avail_prob_on = -std::expm1(-access.q);
    avail_prob_off = -std::expm1(-access.u);
    available = rng.uniform() < access.avail();
  }
  void advance(Philox& rng) {
    if (available) {
      if (rng.bernoulli(avail_prob_off)) available = false;
    } else {
      if (rng.bernoulli(avail_prob_on)) available = true;
    }
  }
};

struct Leg {
  int band = 0;
  double remaining = 0.0;
};

enum class Outcome { kDirect, kHandoff, kFail };

struct Attempt {
  Outcome outcome = Outcome::kFail;
  Leg legs[2];
  int n_legs = 0;
  int leg = 0;
  bool active = false;
};

struct Server {
  std::deque<double> queue;  // arrival timestamps
  Attempt attempt;
  int attempts_used = 0;
};

double t_quantile_975(int dof) {
  static const double table[] = {0,      12.706, 4.303, 3.182, 2.776, 2.571, 2.447,
                                 2.365,  2.306,  2.262, 2.228, 2.201, 2.179, 2.160,
                                 2.145,  2.131,  2.120, 2.110, 2.101, 2.093, 2.086,
                                 2.080,  2.074,  2.069, 2.064, 2.060, 2.056, 2.052,
                                 2.048,  2.045,  2.042};
  if (dof >= 1 && dof <= 30) return table[dof];
  return 1.96;
}

struct BatchAcc {
  std::vector<double> values;
  double half_width() const {
    const int b = static_cast<int>(values.size());
    if (b < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= b;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (b - 1);
    return t_quantile_975(b - 1) * std::sqrt(var / b);
  }
};

}  // namespace

SimReport run(const SimConfig& config) {
  config.validate();
  const ModelConfig& model = config.model;
  const SystemParams& sys = model.system;
  const bool relay_mode = config.mode == Mode::kRelay;
  const double alpha = relay_mode ? config.alpha : 1.0;
  const int cap = sys.buffer_capacity;
  const int max_attempts = sys.max_tx + 1;

  const LinkModel ar = model.make_link(LinkLabel::kSourceRelay, config.snr_db);
  const LinkModel rd = model.make_link(LinkLabel::kRelayDest, config.snr_db);
  const LinkModel ad = model.make_link(LinkLabel::kDirect, config.snr_db);

  ChannelProcess ch_ar, ch_rd, ch_ad;
  ch_ad.init(ad, sys, sys.slot_s);
  if (relay_mode) {
    ch_ar.init(ar, sys, sys.slot_s);
    ch_rd.init(rd, sys, sys.slot_s);
  }

  Philox rng_arrivals = make_stream(config.seed, StreamId::kArrivals);
  Philox rng_fade_src = make_stream(config.seed, StreamId::kFadingSource);
  Philox rng_fade_rly = make_stream(config.seed, StreamId::kFadingRelay);
  Philox rng_fade_dir = make_stream(config.seed, StreamId::kFadingDirect);
  Philox rng_occ_ar = make_stream(config.seed, StreamId::kOccupancyAR);
  Philox rng_occ_rd = make_stream(config.seed, StreamId::kOccupancyRD);
  Philox rng_occ_ad = make_stream(config.seed, StreamId::kOccupancyAD);
  Philox rng_errors = make_stream(config.seed, StreamId::kErrors);
  Philox rng_snr = make_stream(config.seed, StreamId::kSnrSamples);
  Philox rng_traffic = make_stream(config.seed, StreamId::kTraffic);

  Occupancy occ_ar, occ_rd, occ_ad;
  occ_ar.init(SpectrumAccess{model.access_ar.q, model.access_ar.u}, rng_occ_ar);
  occ_rd.init(SpectrumAccess{model.access_rd.q, model.access_rd.u}, rng_occ_rd);
  occ_ad.init(SpectrumAccess{model.access_ad.q, model.access_ad.u}, rng_occ_ad);

  // Arrival pmf tables (one per traffic state for modulated arrivals).
  std::vector<std::vector<double>> arrival_tables;
  if (model.traffic.has_mmpp()) {
    for (double rate : model.traffic.mmpp_rates) {
      TrafficModel t = model.traffic;
      t.mmpp_rates.clear();
      t.mmpp_switch.clear();
      t.mean_rate = rate;
      arrival_tables.push_back(arrival_pmf(t));
    }
  } else {
    arrival_tables.push_back(arrival_pmf(model.traffic));
  }
  int traffic_state = 0;

  // Mean R->D modulation for the relayed tail of a broadcast (same constant
  // the closed-form service time uses).
  double mean_bits_rd = 1.0;
  if (relay_mode) {
    const auto prob = state_probabilities(rd.amc, rd.fading);
    double usable = 0.0;
    double acc = 0.0;
    for (int n = 1; n <= rd.amc.num_modes(); ++n) {
      usable += prob[n];
      acc += prob[n] * rd.amc.modes[n - 1].bits_per_symbol;
    }
    mean_bits_rd = acc / usable;
  }

  const double bits_per_slot = sys.symbol_rate_hz * sys.slot_s;
  auto tau_of = [&](double bits) { return sys.packet_bits / (bits * bits_per_slot); };
  const double tau_rd_tail = relay_mode ? tau_of(mean_bits_rd) : 0.0;

  Server src, rly;
  SimReport report;
  report.mode = config.mode;
  report.alpha = config.alpha;
  report.snr_db = config.snr_db;
  report.slots = config.slots;
  report.warmup = config.warmup;
  report.seed = config.seed;
  report.occupancy_source =
      Eigen::MatrixXd::Zero(model.amc.num_modes(), cap + 1);
  report.occupancy_relay = Eigen::MatrixXd::Zero(model.amc.num_modes(), cap + 1);

  long departures_src = 0;  // packets that left the source queue successfully
  double sojourn_sum = 0.0;
  long avail_ar_slots = 0, avail_rd_slots = 0, avail_ad_slots = 0;
  // Post-warmup counters for the rate estimates.
  long arrived_m = 0, delivered_m = 0, dropped_src_m = 0, dropped_rly_m = 0;
  long departures_m = 0;

  const long window = config.slots - config.warmup;
  const long batch_len = std::max<long>(1, window / config.batches);
  BatchAcc batch_thr, batch_ee, batch_drop, batch_sojourn;
  long batch_delivered = 0, batch_arrived = 0, batch_dropped = 0, batch_sojourn_n = 0;
  double batch_energy = 0.0, batch_sojourn_sum = 0.0;

  std::ofstream trace;
  if (!config.trace_path.empty()) {
    trace.open(config.trace_path);
    if (!trace) throw ModelError("cannot open trace file: " + config.trace_path);
    trace << "slot,chan_src,chan_rly,avail_ar,avail_rd,q_src,q_rly,tx_ok,energy_j\n";
  }

  for (long slot = 0; slot < config.slots; ++slot) {
    const bool measured = slot >= config.warmup;

    // Channel and occupancy updates for the slot.
    ch_ad.advance(rng_fade_dir, rng_snr, sys);
    if (relay_mode) {
      ch_ar.advance(rng_fade_src, rng_snr, sys);
      ch_rd.advance(rng_fade_rly, rng_snr, sys);
    }
    occ_ad.advance(rng_occ_ad);
    occ_ar.advance(rng_occ_ar);
    occ_rd.advance(rng_occ_rd);
    if (measured) {
      avail_ar_slots += occ_ar.available;
      avail_rd_slots += occ_rd.available;
      avail_ad_slots += occ_ad.available;
      const int src_state = relay_mode ? ch_ar.state : ch_ad.state;
      report.occupancy_source(src_state - 1,
                              std::min<int>(cap, static_cast<int>(src.queue.size()))) += 1.0;
      if (relay_mode) {
        report.occupancy_relay(ch_rd.state - 1,
                               std::min<int>(cap, static_cast<int>(rly.queue.size()))) += 1.0;
      }
    }

    long delivered_this_slot = 0;
    double slot_energy = 0.0;

    auto band_available = [&](int band) {
      switch (band) {
        case kBandAR: return occ_ar.available;
        case kBandRD: return occ_rd.available;
        default: return occ_ad.available;
      }
    };

    // ---- phase 1: source broadcast --------------------------------------
    {
      const double budget = alpha;
      double used = 0.0;
      const double tx_power = relay_mode ? ch_ar.power_w : ch_ad.power_w;
      while (!src.queue.empty() && used < budget - 1e-12) {
        if (!src.attempt.active) {
          Attempt& at = src.attempt;
          at.active = true;
          at.leg = 0;
          if (relay_mode) {
            const bool d_ok = rng_errors.uniform() >= ch_ad.per();
            if (d_ok) {
              at.outcome = Outcome::kDirect;
              at.legs[0] = {kBandAD, tau_of(ch_ad.bits())};
              at.n_legs = 1;
            } else {
              const bool r_ok = rng_errors.uniform() >= ch_ar.per();
              at.outcome = r_ok ? Outcome::kHandoff : Outcome::kFail;
              at.legs[0] = {kBandAR, tau_of(ch_ar.bits())};
              at.legs[1] = {kBandRD, tau_rd_tail};
              at.n_legs = 2;
            }
          } else {
            const bool d_ok = rng_errors.uniform() >= ch_ad.per();
            at.outcome = d_ok ? Outcome::kDirect : Outcome::kFail;
            at.legs[0] = {kBandAD, tau_of(ch_ad.bits())};
            at.n_legs = 1;
          }
        }
        Leg& leg = src.attempt.legs[src.attempt.leg];
        if (!band_available(leg.band)) break;  // head-of-line blocks the phase
        const double step = std::min(leg.remaining, budget - used);
        leg.remaining -= step;
        used += step;
        slot_energy += step * sys.slot_s * tx_power;
        if (leg.remaining > 1e-12) break;  // budget exhausted mid-leg
        if (++src.attempt.leg < src.attempt.n_legs) continue;

        // Attempt complete: apply its outcome.
        src.attempt.active = false;
        ++src.attempts_used;
        const double now = slot + used;
        switch (src.attempt.outcome) {
          case Outcome::kDirect: {
            const double arrival = src.queue.front();
            src.queue.pop_front();
            ++report.delivered;
            ++report.delivered_direct;
            ++departures_src;
            ++delivered_this_slot;
            src.attempts_used = 0;
            if (measured) {
              sojourn_sum += now - arrival;
              ++report.sojourn_count;
              ++delivered_m;
              ++departures_m;
              ++batch_delivered;
              batch_sojourn_sum += now - arrival;
              ++batch_sojourn_n;
            }
            break;
          }
          case Outcome::kHandoff: {
            const double arrival = src.queue.front();
            src.queue.pop_front();
            ++departures_src;
            src.attempts_used = 0;
            if (measured) ++departures_m;
            if (static_cast<int>(rly.queue.size()) < cap) {
              rly.queue.push_back(arrival);
            } else {
              ++report.dropped_relay_overflow;
              if (measured) ++dropped_rly_m;
            }
            break;
          }
          case Outcome::kFail:
            if (src.attempts_used >= max_attempts) {
              src.queue.pop_front();
              ++report.failed_source_retx;
              src.attempts_used = 0;
            }
            break;
        }
      }
      slot_energy += (budget - used) * sys.slot_s * sys.idle_power_w;
    }

    // ---- phase 2: relay forwarding ---------------------------------------
    if (relay_mode) {
      const double budget = 1.0 - alpha;
      double used = 0.0;
      const double tx_power = ch_rd.power_w;
      while (!rly.queue.empty() && used < budget - 1e-12) {
        if (!rly.attempt.active) {
          Attempt& at = rly.attempt;
          at.active = true;
          at.leg = 0;
          const bool ok = rng_errors.uniform() >= ch_rd.per();
          at.outcome = ok ? Outcome::kDirect : Outcome::kFail;
          at.legs[0] = {kBandRD, tau_of(ch_rd.bits())};
          at.n_legs = 1;
        }
        Leg& leg = rly.attempt.legs[rly.attempt.leg];
        if (!band_available(leg.band)) break;
        const double step = std::min(leg.remaining, budget - used);
        leg.remaining -= step;
        used += step;
        slot_energy += step * sys.slot_s * tx_power;
        if (leg.remaining > 1e-12) break;

        rly.attempt.active = false;
        ++rly.attempts_used;
        const double now = slot + alpha + used;
        if (rly.attempt.outcome == Outcome::kDirect) {
          const double arrival = rly.queue.front();
          rly.queue.pop_front();
          ++report.delivered;
          ++report.delivered_relay;
          ++delivered_this_slot;
          rly.attempts_used = 0;
          if (measured) {
            sojourn_sum += now - arrival;
            ++report.sojourn_count;
            ++delivered_m;
            ++batch_delivered;
            batch_sojourn_sum += now - arrival;
            ++batch_sojourn_n;
          }
        } else if (rly.attempts_used >= max_attempts) {
          rly.queue.pop_front();
          ++report.failed_relay_retx;
          rly.attempts_used = 0;
        }
      }
      slot_energy += (budget - used) * sys.slot_s * sys.idle_power_w;
    }

    // ---- arrivals (join at the end of the slot) ---------------------------
    if (model.traffic.has_mmpp()) {
      const auto& row = model.traffic.mmpp_switch[traffic_state];
      double u = rng_traffic.uniform();
      double acc = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        acc += row[k];
        if (u < acc) {
          traffic_state = static_cast<int>(k);
          break;
        }
      }
    }
    {
      const auto& pmf = arrival_tables[traffic_state];
      double u = rng_arrivals.uniform();
      int a = 0;
      double acc = 0.0;
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        acc += pmf[k];
        if (u < acc) {
          a = static_cast<int>(k);
          break;
        }
      }
      report.arrived += a;
      const int space = cap - static_cast<int>(src.queue.size());
      const int admitted = std::min(a, space);
      for (int i = 0; i < admitted; ++i) src.queue.push_back(slot + 1.0);
      report.dropped_source_overflow += a - admitted;
      if (measured) {
        arrived_m += a;
        dropped_src_m += a - admitted;
        batch_arrived += a;
        batch_dropped += a - admitted;
      }
    }

    if (measured) {
      report.energy_j += slot_energy;
      batch_energy += slot_energy;
      const long done = slot - config.warmup + 1;
      if (done % batch_len == 0 && static_cast<int>(batch_thr.values.size()) < config.batches) {
        batch_thr.values.push_back(static_cast<double>(batch_delivered) / batch_len);
        batch_ee.values.push_back(batch_energy > 0.0 ? batch_delivered / batch_energy : 0.0);
        batch_drop.values.push_back(
            batch_arrived > 0 ? static_cast<double>(batch_dropped) / batch_arrived : 0.0);
        batch_sojourn.values.push_back(batch_sojourn_n > 0 ? batch_sojourn_sum / batch_sojourn_n
                                                           : 0.0);
        batch_delivered = 0;
        batch_arrived = 0;
        batch_dropped = 0;
        batch_sojourn_n = 0;
        batch_energy = 0.0;
        batch_sojourn_sum = 0.0;
      }
    }

    if (trace.is_open()) {
      char line[160];
      std::snprintf(line, sizeof(line), "%ld,%d,%d,%d,%d,%zu,%zu,%ld,%.9g\n", slot,
                    relay_mode ? ch_ar.state : ch_ad.state, relay_mode ? ch_rd.state : 0,
                    occ_ar.available ? 1 : 0, occ_rd.available ? 1 : 0, src.queue.size(),
                    rly.queue.size(), delivered_this_slot, slot_energy);
      trace << line;
    }
  }

  report.in_system_end =
      static_cast<long>(src.queue.size()) + static_cast<long>(rly.queue.size());

  const double measured_slots = static_cast<double>(config.slots - config.warmup);
  report.throughput = delivered_m / measured_slots;
  report.drop_source = arrived_m > 0 ? static_cast<double>(dropped_src_m) / arrived_m : 0.0;
  report.drop_relay =
      departures_m > 0 ? static_cast<double>(dropped_rly_m) / departures_m : 0.0;
  report.sojourn_mean = report.sojourn_count > 0 ? sojourn_sum / report.sojourn_count : 0.0;
  report.ee = report.energy_j > 0.0 ? delivered_m / report.energy_j : 0.0;
  report.avail_ar = avail_ar_slots / measured_slots;
  report.avail_rd = avail_rd_slots / measured_slots;
  report.avail_ad = avail_ad_slots / measured_slots;
  double occ_total = report.occupancy_source.sum();
  if (occ_total > 0.0) report.occupancy_source /= occ_total;
  occ_total = report.occupancy_relay.sum();
  if (occ_total > 0.0) report.occupancy_relay /= occ_total;

  report.hw_throughput = batch_thr.half_width();
  report.hw_ee = batch_ee.half_width();
  report.hw_drop_source = batch_drop.half_width();
  report.hw_sojourn = batch_sojourn.half_width();
  return report;
}

namespace {

ValidationEntry compare_rel(const std::string& name, double analytic, double simulated,
                            double rel) {
  ValidationEntry e;
  e.metric = name;
  e.analytic = analytic;
  e.simulated = simulated;
  const double scale = std::max(std::abs(analytic), std::abs(simulated));
  e.gap = scale > 0.0 ? std::abs(analytic - simulated) / scale : 0.0;
  e.tol = rel;
  e.pass = e.gap <= rel;
  return e;
}

ValidationEntry compare_drop(const std::string& name, double analytic, double simulated,
                             const ValidationTolerances& tol) {
  if (analytic < tol.small_cut && simulated < tol.small_cut) {
    ValidationEntry e;
    e.metric = name;
    e.analytic = analytic;
    e.simulated = simulated;
    e.gap = std::abs(analytic - simulated);
    e.tol = tol.drop_abs_small;
    e.pass = e.gap <= tol.drop_abs_small;
    return e;
  }
  return compare_rel(name, analytic, simulated, tol.drop_rel);
}

}  // namespace

ValidationReport validate(const EvalDetail& analytic, const std::vector<SimReport>& sims,
                          const ValidationTolerances& tol) {
  if (sims.empty()) throw InvalidParameterError("validation needs at least one simulation run");
  const LinkMetrics& m = analytic.metrics;
  for (const SimReport& s : sims) {
    if (s.mode != m.mode || std::abs(s.snr_db - m.snr_db) > 1e-9 ||
        (m.mode == Mode::kRelay && std::abs(s.alpha - m.alpha) > 1e-9)) {
      throw InvalidParameterError("simulation runs do not match the analytic operating point");
    }
  }

  double ee = 0.0, thr = 0.0, drop_s = 0.0, drop_r = 0.0, sojourn = 0.0;
  double av_ar = 0.0, av_rd = 0.0, av_ad = 0.0;
  Eigen::MatrixXd occ = Eigen::MatrixXd::Zero(sims[0].occupancy_source.rows(),
                                              sims[0].occupancy_source.cols());
  for (const SimReport& s : sims) {
    ee += s.ee;
    thr += s.throughput;
    drop_s += s.drop_source;
    drop_r += s.drop_relay;
    sojourn += s.sojourn_mean;
    av_ar += s.avail_ar;
    av_rd += s.avail_rd;
    av_ad += s.avail_ad;
    occ += s.occupancy_source;
  }
  const double n = static_cast<double>(sims.size());
  ee /= n;
  thr /= n;
  drop_s /= n;
  drop_r /= n;
  sojourn /= n;
  av_ar /= n;
  av_rd /= n;
  av_ad /= n;
  occ /= n;

  ValidationReport report;
  report.entries.push_back(compare_rel("ee", m.ee, ee, tol.ee_rel));
  report.entries.push_back(compare_rel("throughput", m.throughput, thr, tol.throughput_rel));
  report.entries.push_back(compare_drop("drop_source", m.drop_source, drop_s, tol));
  if (m.mode == Mode::kRelay) {
    report.entries.push_back(compare_drop("drop_relay", m.drop_relay, drop_r, tol));
  }
  report.entries.push_back(compare_rel("delay", m.delay, sojourn, tol.delay_rel));

  // Joint (channel state, buffer level) occupancy of the source queue.
  {
    ValidationEntry e;
    e.metric = "occupancy_l1";
    double l1 = 0.0;
    for (int x = 0; x < occ.rows(); ++x) {
      for (int q = 0; q < occ.cols(); ++q) {
        l1 += std::abs(occ(x, q) - analytic.source_pi.pi(analytic.source_chain.index(x, q)));
      }
    }
    e.analytic = 0.0;
    e.simulated = l1;
    e.gap = l1;
    e.tol = tol.occupancy_l1;
    e.pass = l1 <= tol.occupancy_l1;
    report.entries.push_back(e);
  }

  const SpectrumAccess acc_ar{analytic.ar.access.q, analytic.ar.access.u};
  const SpectrumAccess acc_rd{analytic.rd.access.q, analytic.rd.access.u};
  const SpectrumAccess acc_ad{analytic.ad.access.q, analytic.ad.access.u};
  auto avail_entry = [&](const std::string& name, double expect, double got) {
    ValidationEntry e;
    e.metric = name;
    e.analytic = expect;
    e.simulated = got;
    e.gap = std::abs(expect - got);
    e.tol = tol.avail_abs;
    e.pass = e.gap <= tol.avail_abs;
    return e;
  };
  if (m.mode == Mode::kRelay) {
    report.entries.push_back(avail_entry("avail_ar", acc_ar.avail(), av_ar));
    report.entries.push_back(avail_entry("avail_rd", acc_rd.avail(), av_rd));
  }
  report.entries.push_back(avail_entry("avail_ad", acc_ad.avail(), av_ad));

  report.pass = true;
  for (const ValidationEntry& e : report.entries) report.pass = report.pass && e.pass;
  return report;
}

}  // namespace relayee

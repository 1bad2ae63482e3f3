#include "relayee/channel.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "relayee/quadrature.hpp"

namespace relayee {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int AmcModeTable::state_of(double s) const {
  // boundaries are sorted; state n covers [boundaries[n], boundaries[n+1])
  int n = static_cast<int>(std::upper_bound(boundaries.begin(), boundaries.end(), s) -
                           boundaries.begin()) -
          1;
  return std::clamp(n, 0, num_modes());
}

void AmcModeTable::validate() const {
  const int n = num_modes();
  if (n < 1) throw InvalidParameterError("AMC table needs at least one mode");
  if (static_cast<int>(boundaries.size()) != n + 2) {
    throw InvalidParameterError("AMC table needs N+2 boundaries (N+1 intervals)");
  }
  if (boundaries.front() != 0.0) throw InvalidParameterError("first AMC boundary must be 0");
  if (!std::isinf(boundaries.back())) {
    throw InvalidParameterError("last AMC boundary must be +inf");
  }
  // S_1 may coincide with 0 (empty outage interval); all others are strict.
  for (std::size_t i = 1; i + 1 < boundaries.size(); ++i) {
    bool ok = (i == 1) ? boundaries[i] >= boundaries[i - 1] : boundaries[i] > boundaries[i - 1];
    if (!ok) throw InvalidParameterError("AMC boundaries must be increasing");
  }
  if (boundaries[boundaries.size() - 2] >= boundaries.back()) {
    throw InvalidParameterError("AMC boundaries must be increasing");
  }
  int prev_bits = 0;
  for (const AmcMode& mode : modes) {
    if (mode.bits_per_symbol <= prev_bits) {
      throw InvalidParameterError("bits per symbol must be strictly increasing across modes");
    }
    prev_bits = mode.bits_per_symbol;
    if (mode.per_alpha <= 0.0 || mode.per_g <= 0.0 || mode.per_cutoff < 0.0) {
      throw InvalidParameterError("AMC mode PER parameters must be positive");
    }
    if (mode.per_alpha * std::exp(-mode.per_g * mode.per_cutoff) > 1.0 + 1e-9) {
      throw InvalidParameterError("PER at the mode cutoff exceeds 1");
    }
  }
}

void FadingModel::validate() const {
  if (!(m >= 0.5)) throw InvalidParameterError("Nakagami shape m must be >= 0.5");
  if (!(avg_snr > 0.0)) throw InvalidParameterError("average SNR must be positive");
  if (!(frame_s > 0.0)) throw InvalidParameterError("frame duration must be positive");
  if (doppler_hz < 0.0) throw InvalidParameterError("Doppler frequency must be nonnegative");
}

void SpectrumAccess::validate() const {
  if (!(q > 0.0) || !(u > 0.0)) {
    throw InvalidParameterError("spectrum occupancy rates must be positive");
  }
}

std::string to_string(LinkLabel label) {
  switch (label) {
    case LinkLabel::kSourceRelay: return "A,R";
    case LinkLabel::kRelayDest: return "R,D";
    case LinkLabel::kDirect: return "A,D";
  }
  return "?";
}

double gamma_pdf(double s, const FadingModel& fading) {
  fading.validate();
  if (s < 0.0) throw InvalidParameterError("SNR must be nonnegative");
  const double m = fading.m;
  const double sb = fading.avg_snr;
  if (s == 0.0) {
    if (m == 1.0) return 1.0 / sb;
    return m > 1.0 ? 0.0 : kInf;
  }
  double log_pdf = m * std::log(m) + (m - 1.0) * std::log(s) - m * std::log(sb) -
                   std::lgamma(m) - m * s / sb;
  return std::exp(log_pdf);
}

double gamma_cdf(double s, const FadingModel& fading) {
  if (s <= 0.0) return 0.0;
  if (std::isinf(s)) return 1.0;
  return boost::math::gamma_p(fading.m, fading.m * s / fading.avg_snr);
}

namespace {

// Upper tail; keeps far-tail interval masses representable where the CDF
// difference would cancel to zero.
double gamma_sf(double s, const FadingModel& fading) {
  if (s <= 0.0) return 1.0;
  if (std::isinf(s)) return 0.0;
  return boost::math::gamma_q(fading.m, fading.m * s / fading.avg_snr);
}

}  // namespace

double gamma_quantile(double p, const FadingModel& fading) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return kInf;
  return boost::math::gamma_p_inv(fading.m, p) * fading.avg_snr / fading.m;
}

double interval_mass(double lo, double hi, const FadingModel& fading) {
  if (!(hi > lo)) return 0.0;
  double mass;
  if (gamma_cdf(hi, fading) <= 0.5) {
    mass = gamma_cdf(hi, fading) - gamma_cdf(lo, fading);
  } else {
    mass = gamma_sf(lo, fading) - gamma_sf(hi, fading);
  }
  return std::max(0.0, mass);
}

std::vector<double> state_probabilities(const AmcModeTable& amc, const FadingModel& fading) {
  amc.validate();
  fading.validate();
  std::vector<double> prob(amc.num_modes() + 1);
  for (std::size_t n = 0; n < prob.size(); ++n) {
    prob[n] = interval_mass(amc.boundaries[n], amc.boundaries[n + 1], fading);
  }
  return prob;
}

double per_at(double s, const AmcMode& mode) {
  if (s < 0.0) throw InvalidParameterError("SNR must be nonnegative");
  if (s < mode.per_cutoff) return 1.0;
  double per = mode.per_alpha * std::exp(-mode.per_g * s);
  return std::clamp(per, 0.0, 1.0);
}

double mode_avg_per(int n, const AmcModeTable& amc, const FadingModel& fading) {
  if (n < 1 || n > amc.num_modes()) throw InvalidParameterError("mode index out of range");
  const double lo = amc.boundaries[n];
  const double hi = amc.boundaries[n + 1];
  const AmcMode& mode = amc.modes[n - 1];
  const double mass = interval_mass(lo, hi, fading);
  if (mass <= 0.0) return 0.0;
  // Piecewise: PER is exactly 1 below the cutoff, smooth above it.
  double integral = 0.0;
  const double split = std::clamp(mode.per_cutoff, lo, hi);
  integral += interval_mass(lo, split, fading);
  if (split < hi) {
    integral += integrate(
        [&](double s) {
          return std::min(1.0, mode.per_alpha * std::exp(-mode.per_g * s)) *
                 gamma_pdf(s, fading);
        },
        split, hi);
  }
  return std::clamp(integral / mass, 0.0, 1.0);
}

double avg_link_per(const LinkModel& link) {
  const auto prob = state_probabilities(link.amc, link.fading);
  double num = 0.0;
  double den = 0.0;
  for (int n = 1; n <= link.amc.num_modes(); ++n) {
    double w = link.amc.modes[n - 1].bits_per_symbol * prob[n];
    den += w;
    if (w > 0.0) num += w * mode_avg_per(n, link.amc, link.fading);
  }
  if (den <= 0.0) {
    throw ModelError("degenerate channel: link " + to_string(link.label) +
                     " is always in the outage state");
  }
  return std::clamp(num / den, 0.0, 1.0);
}

CombinedError combined_error(double p_ld, double p_l1, double p_l2) {
  CombinedError e;
  e.p1 = p_ld * p_l1;
  e.p2 = p_ld * (1.0 - p_l1) * p_l2;
  e.p0 = e.p1 + e.p2;
  return e;
}

std::vector<double> msre_boundaries(const std::vector<AmcMode>& modes, double p_target) {
  if (!(p_target > 0.0) || !(p_target < 1.0)) {
    throw InvalidParameterError("p_target must lie in (0, 1)");
  }
  std::vector<double> interior;
  interior.reserve(modes.size());
  for (const AmcMode& mode : modes) {
    // Smallest SNR with per_at <= p_target; below the cutoff the PER is 1.
    double s = std::log(mode.per_alpha / p_target) / mode.per_g;
    interior.push_back(std::max({0.0, s, mode.per_cutoff}));
  }
  for (std::size_t i = 1; i < interior.size(); ++i) {
    if (interior[i] < interior[i - 1]) {
      throw InvalidParameterError("inconsistent mode parameters: MSRE boundaries not monotone");
    }
  }
  return interior;
}

AmcModeTable make_table(std::vector<AmcMode> modes, const std::vector<double>& interior) {
  AmcModeTable table;
  table.modes = std::move(modes);
  table.boundaries.reserve(interior.size() + 2);
  table.boundaries.push_back(0.0);
  table.boundaries.insert(table.boundaries.end(), interior.begin(), interior.end());
  table.boundaries.push_back(kInf);
  table.validate();
  return table;
}

double level_crossing_rate(double s, const FadingModel& fading) {
  if (s <= 0.0 || std::isinf(s) || fading.doppler_hz == 0.0) return 0.0;
  const double m = fading.m;
  const double rho2 = m * s / fading.avg_snr;
  return std::sqrt(2.0 * std::numbers::pi) * fading.doppler_hz *
         std::pow(rho2, m - 0.5) / std::tgamma(m) * std::exp(-rho2);
}

Eigen::MatrixXd fsmc_transitions(const AmcModeTable& amc, const FadingModel& fading) {
  const auto prob = state_probabilities(amc, fading);
  const int states = static_cast<int>(prob.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(states, states);
  for (int n = 0; n < states; ++n) {
    if (prob[n] <= 0.0) {
      p(n, n) = 1.0;  // unreachable state, keep the matrix stochastic
      continue;
    }
    double up = 0.0;
    double down = 0.0;
    if (n + 1 < states) {
      up = level_crossing_rate(amc.boundaries[n + 1], fading) * fading.frame_s / prob[n];
    }
    if (n > 0) {
      down = level_crossing_rate(amc.boundaries[n], fading) * fading.frame_s / prob[n];
    }
    if (up + down > 1.0) {
      // Far-tail states with negligible mass can have mean dwell times
      // below one frame; rescale those rows instead of rejecting the whole
      // model over states that are never visited.
      if (prob[n] > 1e-12) {
        throw ModelError("slow-fading violation: adjacent transition probability exceeds 1 "
                         "(reduce doppler_hz or frame_s)");
      }
      const double scale = (1.0 - 1e-9) / (up + down);
      up *= scale;
      down *= scale;
    }
    if (n + 1 < states) p(n, n + 1) = up;
    if (n > 0) p(n, n - 1) = down;
    p(n, n) = 1.0 - up - down;
  }
  return p;
}

Eigen::MatrixXd censor_outage(const Eigen::MatrixXd& full) {
  const int states = static_cast<int>(full.rows());
  if (states < 2) throw InvalidParameterError("censoring needs at least two states");
  const int n = states - 1;
  Eigen::MatrixXd out(n, n);
  const double stay = full(0, 0);
  for (int i = 1; i < states; ++i) {
    for (int j = 1; j < states; ++j) {
      double via = 0.0;
      if (full(i, 0) > 0.0) {
        if (stay >= 1.0) {
          throw ModelError("outage state is absorbing; cannot censor it away");
        }
        via = full(i, 0) * full(0, j) / (1.0 - stay);
      }
      out(i - 1, j - 1) = full(i, j) + via;
    }
  }
  return out;
}

Eigen::MatrixXd slot_transition_matrix(const LinkModel& link, double slot_s) {
  const Eigen::MatrixXd frame_step = censor_outage(fsmc_transitions(link.amc, link.fading));
  const long steps = std::max(1L, std::lround(slot_s / link.fading.frame_s));
  Eigen::MatrixXd out = frame_step;
  for (long k = 1; k < steps; ++k) out = out * frame_step;
  return out;
}

std::pair<double, double> stationary_access(double q, double u) {
  if (!(q > 0.0) || !(u > 0.0)) {
    throw InvalidParameterError("spectrum occupancy rates must be positive");
  }
  return {q / (q + u), u / (q + u)};
}

namespace {

// Exact packet error probability of an L-bit packet under the BER model
// 0.2 exp(-1.5 s / (2^b - 1)).
double exact_per(double s, int bits, int packet_bits) {
  double ber = 0.2 * std::exp(-1.5 * s / (std::exp2(bits) - 1.0));
  return -std::expm1(packet_bits * std::log1p(-ber));
}

double invert_exact_per(double target, int bits, int packet_bits) {
  double lo = 0.0;
  double hi = 1.0;
  while (exact_per(hi, bits, packet_bits) > target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (exact_per(mid, bits, packet_bits) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

AmcMode fit_amc_mode(int index, int bits_per_symbol, int packet_bits) {
  // Log-linear least squares of ln PER(s) over the PER range [1e-6, 0.5];
  // near 1 the exact curve saturates and the exponential model takes over
  // via the cutoff s_p = ln(alpha)/g.
  const double s_lo = invert_exact_per(0.5, bits_per_symbol, packet_bits);
  const double s_hi = invert_exact_per(1e-6, bits_per_symbol, packet_bits);
  const int samples = 256;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < samples; ++i) {
    double s = s_lo + (s_hi - s_lo) * i / (samples - 1);
    double y = std::log(exact_per(s, bits_per_symbol, packet_bits));
    sx += s;
    sy += y;
    sxx += s * s;
    sxy += s * y;
  }
  double slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
  double intercept = (sy - slope * sx) / samples;
  AmcMode mode;
  mode.index = index;
  mode.bits_per_symbol = bits_per_symbol;
  mode.per_g = -slope;
  mode.per_alpha = std::exp(intercept);
  mode.per_cutoff = std::log(mode.per_alpha) / mode.per_g;
  return mode;
}

AmcModeTable default_amc_table() {
  // Fitted against the exact 100-bit packet error curves; regenerating with
  // fit_amc_mode(n, n, 100) reproduces these values (see tests).
  static const double params[7][3] = {
      // alpha_n, g_n, s_p
      {17.710629013661851, 1.4856824937530706, 1.9345755103649978},
      {17.71062901366103, 0.49522749791768811, 5.8037265310949246},
      {17.71062901366199, 0.21224035625043883, 13.542028572555012},
      {17.71062901366059, 0.099045499583537353, 29.018632655474448},
      {17.710629013661912, 0.047925241733970045, 59.97184082131497},
      {17.710629013660498, 0.023582261805604129, 121.87825715299248},
      {17.710629013660874, 0.011698287352386321, 245.69108981635128},
  };
  std::vector<AmcMode> modes;
  for (int n = 1; n <= 7; ++n) {
    AmcMode mode;
    mode.index = n;
    mode.bits_per_symbol = n;
    mode.per_alpha = params[n - 1][0];
    mode.per_g = params[n - 1][1];
    mode.per_cutoff = params[n - 1][2];
    modes.push_back(mode);
  }
  const double p_target = std::pow(1e-3, 1.0 / 7.0);
  auto interior = msre_boundaries(modes, p_target);
  return make_table(std::move(modes), interior);
}

}  // namespace relayee

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "relayee/errors.hpp"

namespace relayee {

/// One adaptive-modulation mode: modulation size and the fitted
/// packet-error-rate curve per(s) = min(1, alpha * exp(-g * s)), with
/// per(s) = 1 below the cutoff s_p.
struct AmcMode {
  int index = 0;           // 1-based mode number
  int bits_per_symbol = 0; // b_n
  double per_alpha = 0.0;  // alpha_n
  double per_g = 0.0;      // g_n, 1/linear-SNR
  double per_cutoff = 0.0; // s_p, linear SNR
};

/// Mode table plus the SNR partition. boundaries has N+2 entries:
/// boundaries[0] = 0, boundaries[N+1] = +inf; interval 0 carries no
/// transmission.
struct AmcModeTable {
  std::vector<AmcMode> modes;
  std::vector<double> boundaries;

  int num_modes() const { return static_cast<int>(modes.size()); }
  /// Index of the interval containing s (0 = outage, 1..N = modes).
  int state_of(double s) const;
  void validate() const;
};

/// Nakagami-m fading: received SNR is Gamma distributed with mean avg_snr.
struct FadingModel {
  double m = 1.0;        // Nakagami shape, >= 0.5
  double avg_snr = 1.0;  // linear
  double doppler_hz = 10.0;
  double frame_s = 1e-3;

  void validate() const;
};

/// Two-state spectrum occupancy of the primary system on one link.
/// q is the rate of becoming available, u the rate of becoming unavailable,
/// both per time-unit; stationary split is q/(q+u) vs u/(q+u).
struct SpectrumAccess {
  double q = 1.0;
  double u = 1.0;

  double avail() const { return q / (q + u); }
  double unavail() const { return u / (q + u); }
  void validate() const;
};

enum class LinkLabel { kSourceRelay, kRelayDest, kDirect };

std::string to_string(LinkLabel label);

/// One wireless link: fading statistics, spectrum-access process and the
/// shared AMC table.
struct LinkModel {
  FadingModel fading;
  AmcModeTable amc;
  SpectrumAccess access;
  LinkLabel label = LinkLabel::kDirect;
};

// --- fading statistics ------------------------------------------------------

/// Gamma density of the received SNR (Nakagami-m power).
double gamma_pdf(double s, const FadingModel& fading);

/// CDF of the received SNR.
double gamma_cdf(double s, const FadingModel& fading);

/// Inverse CDF (for conditional interval sampling).
double gamma_quantile(double p, const FadingModel& fading);

/// P(lo <= S < hi), evaluated from whichever tail keeps precision.
double interval_mass(double lo, double hi, const FadingModel& fading);

/// Probability of each channel state n = 0..N (CDF differences over the
/// partition). Sums to 1.
std::vector<double> state_probabilities(const AmcModeTable& amc, const FadingModel& fading);

// --- packet error rates -----------------------------------------------------

/// Instantaneous PER of a mode at SNR s, clamped to [0, 1].
double per_at(double s, const AmcMode& mode);

/// Average PER of mode n over its own SNR interval, conditioned on the
/// channel being in state n.
double mode_avg_per(int n, const AmcModeTable& amc, const FadingModel& fading);

/// Rate-weighted average packet error rate of a link:
///   sum_n b_n Pr(n) PER_n / sum_n b_n Pr(n), n = 1..N.
/// Throws when the channel is stuck in the outage state.
double avg_link_per(const LinkModel& link);

struct CombinedError {
  double p1 = 0.0;  // both destination and relay fail on the broadcast
  double p2 = 0.0;  // relay decoded, destination failed on both phases
  double p0 = 0.0;  // overall per-attempt failure, p1 + p2
};

/// Per-attempt failure probabilities of the relay-assisted transmission
/// from the three per-link average PERs.
CombinedError combined_error(double p_ld, double p_l1, double p_l2);

// --- partitions -------------------------------------------------------------

/// Boundaries S_1..S_N placed at the smallest SNR where each mode's PER
/// drops to p_target (clamped below by the mode cutoff). Interior
/// boundaries only; prepend 0 and append +inf to build a table.
std::vector<double> msre_boundaries(const std::vector<AmcMode>& modes, double p_target);

/// Assemble a table from modes plus interior boundaries S_1..S_N.
AmcModeTable make_table(std::vector<AmcMode> modes, const std::vector<double>& interior);

// --- channel dynamics -------------------------------------------------------

/// Nakagami envelope level-crossing rate at linear SNR level s (crossings
/// per second for maximum Doppler fading.doppler_hz).
double level_crossing_rate(double s, const FadingModel& fading);

/// Slow-fading finite-state Markov chain over states 0..N: tridiagonal,
/// row-stochastic; adjacent transition probabilities from level-crossing
/// rates over one frame.
Eigen::MatrixXd fsmc_transitions(const AmcModeTable& amc, const FadingModel& fading);

/// Remove the outage state by exact censoring (watch the chain only while
/// in states 1..N). Input is the (N+1)-state matrix, output is N x N.
Eigen::MatrixXd censor_outage(const Eigen::MatrixXd& full);

/// Per-slot channel step over the transmission states: the censored
/// frame-level chain advanced round(slot_s / frame_s) times. Composing
/// frame steps keeps the adjacent-transition construction valid even where
/// one slot spans several level crossings.
Eigen::MatrixXd slot_transition_matrix(const LinkModel& link, double slot_s);

/// Stationary probabilities (available, unavailable) of the occupancy chain.
std::pair<double, double> stationary_access(double q, double u);

// --- default table ----------------------------------------------------------

/// Least-squares fit of (alpha, g, s_p) for one modulation size against the
/// exact packet error curve 1 - (1 - 0.2 exp(-1.5 s / (2^b - 1)))^L.
AmcMode fit_amc_mode(int index, int bits_per_symbol, int packet_bits);

/// The built-in 7-mode table (b = 1..7, packet length 100), boundaries at
/// the minimum SNR reaching p_target = 0.001^(1/7) per mode.
AmcModeTable default_amc_table();

}  // namespace relayee

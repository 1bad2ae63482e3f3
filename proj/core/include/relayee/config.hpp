#pragma once

#include <string>
#include <string_view>

#include "relayee/channel.hpp"
#include "relayee/queueing.hpp"

namespace relayee {

/// Switches for the places where two defensible formula readings exist.
/// Defaults favor the internally consistent forms; the *paper_literal*
/// variants keep the alternative algebra reachable from config.
struct ModelFlags {
  enum class L1Weighting { kInterNode, kDirect };
  enum class LittleRate { kAccepted, kOffered };
  enum class DirectThroughput { kConsistent, kPaperLiteral };
  enum class RelayArrivals { kQuantized, kPaperHybrid };
  enum class DelayForm { kLittle, kPaperLiteral };
  enum class EnergyForm { kBusyWeighted, kPaperLiteral };

  L1Weighting l1_weighting = L1Weighting::kInterNode;
  LittleRate little_rate = LittleRate::kAccepted;
  DirectThroughput direct_throughput = DirectThroughput::kConsistent;
  RelayArrivals relay_arrivals = RelayArrivals::kQuantized;
  DelayForm delay_form = DelayForm::kLittle;
  EnergyForm energy_form = EnergyForm::kBusyWeighted;
};

struct LinkConfig {
  double snr_offset_db = 0.0;  // applied on top of the operating-point SNR
  double m = 1.0;
  double doppler_hz = 10.0;
  double frame_s = 1e-3;
};

struct AccessConfig {
  double q = 1.0;
  double u = 1.0;
};

struct OptimizerConfig {
  int alpha_grid = 99;        // 0.01 .. 0.99
  double snr_min_db = 0.0;
  double snr_max_db = 30.0;
  double tol = 1e-4;          // golden-section relative tolerance
  int max_eep_sweeps = 3;     // coordinate-descent passes for EEP boundaries
};

struct SimulateConfig {
  long slots = 1000000;
  long warmup = 10000;
  std::uint64_t seed = 12345;
  int batches = 20;
};

/// Full model configuration; mirrors the config file sections.
struct ModelConfig {
  SystemParams system;
  TrafficModel traffic;
  AmcModeTable amc;
  double alpha = 0.53;   // default operating point
  double snr_db = 5.0;
  LinkConfig link_ar, link_rd, link_ad;
  AccessConfig access_ar, access_rd, access_ad;
  OptimizerConfig optimizer;
  SimulateConfig simulate;
  ModelFlags flags;

  /// Build one link at the common operating SNR (dB) plus its offset.
  LinkModel make_link(LinkLabel label, double common_snr_db) const;
  void validate() const;
};

/// Built-in defaults: 7-mode table, 51-level buffers, 6 retransmissions,
/// 100-bit packets at 100 kHz, lambda = 1.
ModelConfig default_config();

ModelConfig parse_config(std::string_view text, const std::string& origin = "<string>");
ModelConfig load_config(const std::string& path);

/// Serialize a configuration back to the file format (17 significant
/// digits, round-trips exactly).
std::string dump_config(const ModelConfig& config);

}  // namespace relayee

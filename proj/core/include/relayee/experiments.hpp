#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relayee/optimizer.hpp"
#include "relayee/simulator.hpp"

namespace relayee {

/// In-memory CSV: header plus formatted rows; numbers carry 9 significant
/// digits so identical inputs reproduce byte-identical files.
struct CsvTable {
  std::string header;
  std::vector<std::string> rows;

  std::string str() const;
  void write(const std::string& path) const;
};

std::string format_double(double v);  // %.9g

/// The common metrics row schema.
extern const char* kMetricsHeader;
std::string metrics_row(const LinkMetrics& m);

/// Number of worker threads: RELAYEE_THREADS when set, else the hardware
/// concurrency.
int worker_threads();

/// Run fn(i) for i in [0, n), possibly in parallel; results must be written
/// into per-index slots by the callers.
void parallel_for(int n, const std::function<void(int)>& fn);

enum class BoundaryPolicy { kTable, kMsre, kEep };

/// One operating point per requested mode.
CsvTable analyze(const ModelConfig& config, std::optional<Mode> mode, double alpha,
                 double snr_db, const std::string& dump_chain_path = "");

/// Energy efficiency across the alpha grid at a fixed SNR. With kEep the
/// partition is re-optimized at every grid point; kMsre swaps in the
/// minimum-SNR partition; kTable keeps the configured boundaries.
CsvTable sweep_alpha(const ModelConfig& config, double snr_db,
                     BoundaryPolicy policy = BoundaryPolicy::kTable);

/// Metrics across an SNR sweep for one mode and fixed alpha.
CsvTable sweep_snr(const ModelConfig& config, Mode mode, double alpha, double snr_min_db,
                   double snr_max_db, int points);

/// Metrics across buffer sizes at a fixed operating point (extra leading
/// `buffer` column).
CsvTable sweep_buffer(const ModelConfig& config, const std::vector<int>& buffers, double alpha,
                      double snr_db);

CsvTable optimize_table(const PlanResult& plan);

CsvTable switch_table(const SwitchDecision& decision, double delay_budget, double alpha);

CsvTable simulate_table(const std::vector<SimReport>& reports);

CsvTable validation_table(const std::vector<std::pair<double, ValidationReport>>& per_snr);

/// Chain debug dump: pi rows (chi_index, buffer, pi) to `path` and the
/// transition matrix to `path`.matrix.csv.
void dump_chain(const JointChain& chain, const StationaryDistribution& pi,
                const std::string& path);

}  // namespace relayee

#include "relayee/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "relayee/units.hpp"

namespace relayee {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string CsvTable::str() const {
  std::string out = header;
  out.push_back('\n');
  for (const std::string& row : rows) {
    out += row;
    out.push_back('\n');
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot open output file: " + path);
  out << str();
}

const char* kMetricsHeader =
    "mode,alpha,snr_db,drop_src,drop_relay,delay,throughput,power_w,energy_j,ee";

std::string metrics_row(const LinkMetrics& m) {
  std::ostringstream row;
  row << to_string(m.mode) << ',' << format_double(m.alpha) << ',' << format_double(m.snr_db)
      << ',' << format_double(m.drop_source) << ',' << format_double(m.drop_relay) << ','
      << format_double(m.delay) << ',' << format_double(m.throughput) << ','
      << format_double(m.power_total) << ',' << format_double(m.energy_per_period) << ','
      << format_double(m.ee);
  return row.str();
}

int worker_threads() {
  if (const char* env = std::getenv("RELAYEE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_threads(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void dump_chain(const JointChain& chain, const StationaryDistribution& pi,
                const std::string& path) {
  CsvTable table;
  table.header = "chi_index,buffer,pi";
  for (int x = 0; x < chain.num_service_states; ++x) {
    for (int q = 0; q < chain.buffer_levels; ++q) {
      table.rows.push_back(std::to_string(x + 1) + "," + std::to_string(q) + "," +
                           format_double(pi.pi(chain.index(x, q))));
    }
  }
  table.write(path);

  std::ofstream mat(path + ".matrix.csv", std::ios::binary);
  if (!mat) throw ModelError("cannot open output file: " + path + ".matrix.csv");
  for (int i = 0; i < chain.size(); ++i) {
    for (int j = 0; j < chain.size(); ++j) {
      if (j) mat << ',';
      mat << format_double(chain.transition(i, j));
    }
    mat << '\n';
  }
}

CsvTable analyze(const ModelConfig& config, std::optional<Mode> mode, double alpha,
                 double snr_db, const std::string& dump_chain_path) {
  CsvTable table;
  table.header = kMetricsHeader;
  std::vector<Mode> modes;
  if (mode) {
    modes.push_back(*mode);
  } else {
    modes = {Mode::kRelay, Mode::kDirect};
  }
  for (Mode m : modes) {
    EvalDetail d = evaluate(config, m, alpha, snr_db);
    table.rows.push_back(metrics_row(d.metrics));
    if (!dump_chain_path.empty() && m == Mode::kRelay) {
      dump_chain(d.source_chain, d.source_pi, dump_chain_path);
      dump_chain(d.relay_chain, d.relay_pi, dump_chain_path + ".relay");
    } else if (!dump_chain_path.empty()) {
      dump_chain(d.source_chain, d.source_pi, dump_chain_path);
    }
  }
  return table;
}

namespace {

std::vector<double> grid_alphas(const ModelConfig& config) {
  std::vector<double> alphas(config.optimizer.alpha_grid);
  for (int i = 0; i < config.optimizer.alpha_grid; ++i) {
    alphas[i] = static_cast<double>(i + 1) / (config.optimizer.alpha_grid + 1);
  }
  return alphas;
}

}  // namespace

CsvTable sweep_alpha(const ModelConfig& config, double snr_db, BoundaryPolicy policy) {
  const auto alphas = grid_alphas(config);
  std::vector<std::string> rows(alphas.size());

  ModelConfig base = config;
  if (policy == BoundaryPolicy::kMsre) {
    const double p_target =
        std::pow(config.system.loss_budget, 1.0 / (config.system.max_tx + 1));
    base.amc = make_table(config.amc.modes, msre_boundaries(config.amc.modes, p_target));
  }

  parallel_for(static_cast<int>(alphas.size()), [&](int i) {
    ModelConfig local = base;
    if (policy == BoundaryPolicy::kEep) {
      local.alpha = alphas[i];
      local.snr_db = snr_db;
      EepResult eep = eep_boundaries(local);
      local.amc = make_table(local.amc.modes, eep.interior);
    }
    EvalDetail d = evaluate_relay(local, alphas[i], snr_db);
    rows[i] = metrics_row(d.metrics);
  });

  CsvTable table;
  table.header = kMetricsHeader;
  table.rows = std::move(rows);
  return table;
}

CsvTable sweep_snr(const ModelConfig& config, Mode mode, double alpha, double snr_min_db,
                   double snr_max_db, int points) {
  if (points < 2) throw InvalidParameterError("SNR sweep needs at least 2 points");
  std::vector<std::string> rows(points);
  parallel_for(points, [&](int i) {
    const double snr = snr_min_db + (snr_max_db - snr_min_db) * i / (points - 1);
    EvalDetail d = evaluate(config, mode, alpha, snr);
    rows[i] = metrics_row(d.metrics);
  });
  CsvTable table;
  table.header = kMetricsHeader;
  table.rows = std::move(rows);
  return table;
}

CsvTable sweep_buffer(const ModelConfig& config, const std::vector<int>& buffers, double alpha,
                      double snr_db) {
  if (buffers.empty()) throw InvalidParameterError("buffer sweep needs at least one size");
  std::vector<std::string> rows(buffers.size());
  parallel_for(static_cast<int>(buffers.size()), [&](int i) {
    ModelConfig local = config;
    local.system.buffer_capacity = buffers[i];
    EvalDetail d = evaluate_relay(local, alpha, snr_db);
    rows[i] = std::to_string(buffers[i]) + "," + metrics_row(d.metrics);
  });
  CsvTable table;
  table.header = std::string("buffer,") + kMetricsHeader;
  table.rows = std::move(rows);
  return table;
}

CsvTable optimize_table(const PlanResult& plan) {
  CsvTable table;
  table.header =
      "mode,alpha_star,snr_db_star,snr_db_star_relay,ee,delay,feasible,policy_boundaries_db";
  std::ostringstream row;
  row << to_string(plan.mode) << ','
      << (plan.alpha_star ? format_double(*plan.alpha_star) : "none") << ','
      << format_double(plan.snr_db_star) << ',' << format_double(plan.snr_db_star_relay) << ','
      << format_double(plan.ee) << ',' << format_double(plan.delay) << ','
      << (plan.feasible ? 1 : 0) << ',';
  for (std::size_t p = 0; p < plan.policy.size(); ++p) {
    if (p) row << '|';
    const auto& bounds = plan.policy[p].boundaries;
    for (std::size_t i = 1; i + 1 < bounds.size(); ++i) {
      if (i > 1) row << ' ';
      row << format_double(linear_to_db(bounds[i]));
    }
  }
  table.rows.push_back(row.str());
  return table;
}

CsvTable switch_table(const SwitchDecision& decision, double delay_budget, double alpha) {
  CsvTable table;
  table.header =
      "alpha,delay_budget,chosen,ee_relay,ee_direct,d_star,access_lhs,access_rhs_literal,"
      "access_rhs_mixture";
  std::ostringstream row;
  row << format_double(alpha) << ',' << format_double(delay_budget) << ','
      << to_string(decision.chosen) << ',' << format_double(decision.ee_relay) << ','
      << format_double(decision.ee_direct) << ','
      << (decision.threshold ? format_double(*decision.threshold) : "none") << ','
      << format_double(decision.access_lhs) << ','
      << format_double(decision.access_rhs_literal) << ','
      << format_double(decision.access_rhs_mixture);
  table.rows.push_back(row.str());
  return table;
}

CsvTable simulate_table(const std::vector<SimReport>& reports) {
  CsvTable table;
  table.header =
      "mode,alpha,snr_db,slots,seed,drop_src,drop_relay,throughput,delay,energy_j,ee,"
      "avail_ar,avail_rd,avail_ad,delivered,arrived";
  for (const SimReport& r : reports) {
    std::ostringstream row;
    row << to_string(r.mode) << ',' << format_double(r.alpha) << ',' << format_double(r.snr_db)
        << ',' << r.slots << ',' << r.seed << ',' << format_double(r.drop_source) << ','
        << format_double(r.drop_relay) << ',' << format_double(r.throughput) << ','
        << format_double(r.sojourn_mean) << ',' << format_double(r.energy_j) << ','
        << format_double(r.ee) << ',' << format_double(r.avail_ar) << ','
        << format_double(r.avail_rd) << ',' << format_double(r.avail_ad) << ',' << r.delivered
        << ',' << r.arrived;
    table.rows.push_back(row.str());
  }
  return table;
}

CsvTable validation_table(const std::vector<std::pair<double, ValidationReport>>& per_snr) {
  CsvTable table;
  table.header = "snr_db,metric,analytic,simulated,gap,tol,pass";
  for (const auto& [snr, report] : per_snr) {
    for (const ValidationEntry& e : report.entries) {
      std::ostringstream row;
      row << format_double(snr) << ',' << e.metric << ',' << format_double(e.analytic) << ','
          << format_double(e.simulated) << ',' << format_double(e.gap) << ','
          << format_double(e.tol) << ',' << (e.pass ? 1 : 0);
      table.rows.push_back(row.str());
    }
  }
  return table;
}

}  // namespace relayee

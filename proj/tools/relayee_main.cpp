// relayee: delay, drop, throughput, power and energy-efficiency analysis of
// a buffer-aided decode-and-forward relay link with adaptive modulation and
// opportunistic spectrum access.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "relayee/experiments.hpp"

namespace {

using namespace relayee;

constexpr int kExitOk = 0;
constexpr int kExitModelError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  bool echo_config = false;
};

ModelConfig load(const CommonArgs& args) {
  ModelConfig config =
      args.config_path.empty() ? default_config() : load_config(args.config_path);
  if (args.echo_config) std::cerr << dump_config(config);
  return config;
}

void emit(const CsvTable& table, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << table.str();
  } else {
    table.write(out_path);
  }
}

std::optional<Mode> parse_mode(const std::string& name) {
  if (name == "relay") return Mode::kRelay;
  if (name == "direct") return Mode::kDirect;
  if (name == "both") return std::nullopt;
  throw CLI::ValidationError("--mode must be relay, direct, or both");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"buffer-aided relay link analysis with opportunistic spectrum access"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CommonArgs common;
  double alpha = -1.0;  // negative: take the config value
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  std::string mode_name = "relay";
  std::string dump_chain_path;
  std::string trace_path;
  std::string boundaries_name = "table";
  double snr_min_db = std::numeric_limits<double>::quiet_NaN();
  double snr_max_db = std::numeric_limits<double>::quiet_NaN();
  int snr_points = 20;
  std::vector<int> buffers{5, 10, 25, 50};
  double delay_budget = -1.0;
  double tol = -1.0;
  int alpha_grid = -1;
  long slots = -1;
  int seeds = 1;
  std::uint64_t seed = 0;
  bool have_seed = false;
  std::vector<double> validate_snrs;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", common.config_path, "model configuration file");
    cmd->add_option("--out,-o", common.out_path, "output CSV path (default: stdout)");
    cmd->add_flag("--echo-config", common.echo_config,
                  "print the effective configuration (defaults filled) to stderr");
  };

  CLI::App* cmd_analyze = app.add_subcommand("analyze", "metrics at one operating point");
  add_common(cmd_analyze);
  cmd_analyze->add_option("--alpha", alpha, "time allocation ratio");
  cmd_analyze->add_option("--snr-db", snr_db, "average SNR (dB)");
  cmd_analyze->add_option("--mode", mode_name, "relay | direct | both");
  cmd_analyze->add_option("--dump-chain", dump_chain_path, "write the chain and pi as CSV");

  CLI::App* cmd_sweep_alpha =
      app.add_subcommand("sweep-alpha", "energy efficiency across the alpha grid");
  add_common(cmd_sweep_alpha);
  cmd_sweep_alpha->add_option("--snr-db", snr_db, "average SNR (dB)");
  cmd_sweep_alpha->add_option("--alpha-grid", alpha_grid, "number of grid points");
  cmd_sweep_alpha->add_option("--boundaries", boundaries_name,
                              "table | msre | eep (re-optimized per grid point)");

  CLI::App* cmd_sweep_snr = app.add_subcommand("sweep-snr", "metrics across an SNR sweep");
  add_common(cmd_sweep_snr);
  cmd_sweep_snr->add_option("--alpha", alpha, "time allocation ratio");
  cmd_sweep_snr->add_option("--mode", mode_name, "relay | direct");
  cmd_sweep_snr->add_option("--snr-min-db", snr_min_db, "sweep start (dB)");
  cmd_sweep_snr->add_option("--snr-max-db", snr_max_db, "sweep end (dB)");
  cmd_sweep_snr->add_option("--points", snr_points, "number of sweep points");

  CLI::App* cmd_sweep_buffer =
      app.add_subcommand("sweep-buffer", "drop rate across buffer sizes");
  add_common(cmd_sweep_buffer);
  cmd_sweep_buffer->add_option("--alpha", alpha, "time allocation ratio");
  cmd_sweep_buffer->add_option("--snr-db", snr_db, "average SNR (dB)");
  cmd_sweep_buffer->add_option("--buffers", buffers, "buffer sizes to sweep");

  CLI::App* cmd_optimize =
      app.add_subcommand("optimize", "energy-efficient (alpha, SNR) plan");
  add_common(cmd_optimize);
  cmd_optimize->add_option("--mode", mode_name, "relay | direct");
  cmd_optimize->add_option("--delay-budget", delay_budget, "maximum tolerable delay");
  cmd_optimize->add_option("--alpha-grid", alpha_grid, "alpha grid size");
  cmd_optimize->add_option("--snr-min-db", snr_min_db, "search lower bound (dB)");
  cmd_optimize->add_option("--snr-max-db", snr_max_db, "search upper bound (dB)");
  cmd_optimize->add_option("--tol", tol, "golden-section relative tolerance");

  CLI::App* cmd_switch =
      app.add_subcommand("switch-threshold", "direct-vs-relay switching report");
  add_common(cmd_switch);
  cmd_switch->add_option("--alpha", alpha, "time allocation ratio");
  cmd_switch->add_option("--delay-budget", delay_budget, "delay budget to decide at")
      ->required();
  cmd_switch->add_option("--snr-min-db", snr_min_db, "search lower bound (dB)");
  cmd_switch->add_option("--snr-max-db", snr_max_db, "search upper bound (dB)");

  CLI::App* cmd_simulate = app.add_subcommand("simulate", "Monte-Carlo run(s)");
  add_common(cmd_simulate);
  cmd_simulate->add_option("--alpha", alpha, "time allocation ratio");
  cmd_simulate->add_option("--snr-db", snr_db, "average SNR (dB)");
  cmd_simulate->add_option("--mode", mode_name, "relay | direct");
  cmd_simulate->add_option("--slots", slots, "simulated slots");
  cmd_simulate->add_option("--seed", seed, "base RNG seed");
  cmd_simulate->add_option("--seeds", seeds, "number of consecutive seeds");
  cmd_simulate->add_option("--trace", trace_path, "per-slot trace CSV");

  CLI::App* cmd_validate =
      app.add_subcommand("validate", "closed-form vs simulation comparison ledger");
  add_common(cmd_validate);
  cmd_validate->add_option("--alpha", alpha, "time allocation ratio");
  cmd_validate->add_option("--snr-db", validate_snrs, "SNR points (dB) to validate at");
  cmd_validate->add_option("--slots", slots, "simulated slots per run");
  cmd_validate->add_option("--seeds", seeds, "seeds per SNR point");
  cmd_validate->add_option("--seed", seed, "base RNG seed");

  double lambda_override = -1.0;
  for (CLI::App* cmd : {cmd_analyze, cmd_sweep_alpha, cmd_sweep_snr, cmd_sweep_buffer,
                        cmd_optimize, cmd_simulate, cmd_validate}) {
    cmd->add_option("--lambda", lambda_override, "override [traffic].lambda");
  }
  (void)have_seed;

  CLI11_PARSE(app, argc, argv);

  const bool seed_given =
      cmd_simulate->count("--seed") > 0 || cmd_validate->count("--seed") > 0;

  try {
    ModelConfig config = load(common);
    if (lambda_override > 0.0) config.traffic.mean_rate = lambda_override;
    if (alpha_grid >= 1) config.optimizer.alpha_grid = alpha_grid;
    if (!std::isnan(snr_min_db)) config.optimizer.snr_min_db = snr_min_db;
    if (!std::isnan(snr_max_db)) config.optimizer.snr_max_db = snr_max_db;
    if (tol > 0.0) config.optimizer.tol = tol;
    if (slots > 0) config.simulate.slots = slots;
    if (seed_given) config.simulate.seed = seed;
    const double use_alpha = alpha > 0.0 ? alpha : config.alpha;
    const double use_snr = std::isnan(snr_db) ? config.snr_db : snr_db;
    config.validate();

    if (*cmd_analyze) {
      emit(analyze(config, parse_mode(mode_name), use_alpha, use_snr, dump_chain_path),
           common.out_path);
    } else if (*cmd_sweep_alpha) {
      BoundaryPolicy policy = BoundaryPolicy::kTable;
      if (boundaries_name == "msre") policy = BoundaryPolicy::kMsre;
      else if (boundaries_name == "eep") policy = BoundaryPolicy::kEep;
      else if (boundaries_name != "table") {
        std::cerr << "error: --boundaries must be table, msre, or eep\n";
        return kExitUsage;
      }
      emit(sweep_alpha(config, use_snr, policy), common.out_path);
    } else if (*cmd_sweep_snr) {
      auto mode = parse_mode(mode_name);
      if (!mode) {
        std::cerr << "error: sweep-snr needs --mode relay or direct\n";
        return kExitUsage;
      }
      emit(sweep_snr(config, *mode, use_alpha, config.optimizer.snr_min_db,
                     config.optimizer.snr_max_db, snr_points),
           common.out_path);
    } else if (*cmd_sweep_buffer) {
      emit(sweep_buffer(config, buffers, use_alpha, use_snr), common.out_path);
    } else if (*cmd_optimize) {
      std::optional<double> budget;
      if (delay_budget > 0.0) budget = delay_budget;
      auto mode = parse_mode(mode_name);
      PlanResult plan = (!mode || *mode == Mode::kRelay) ? optimize_relay(config, budget)
                                                         : optimize_direct(config, budget);
      emit(optimize_table(plan), common.out_path);
    } else if (*cmd_switch) {
      emit(switch_table(switch_decision(config, delay_budget, use_alpha), delay_budget,
                        use_alpha),
           common.out_path);
    } else if (*cmd_simulate) {
      auto mode = parse_mode(mode_name);
      SimConfig sim = sim_config_from(config, mode.value_or(Mode::kRelay));
      sim.alpha = use_alpha;
      sim.snr_db = use_snr;
      sim.trace_path = trace_path;
      std::vector<SimReport> reports;
      for (int s = 0; s < seeds; ++s) {
        SimConfig run_config = sim;
        run_config.seed = sim.seed + s;
        if (s > 0) run_config.trace_path.clear();
        reports.push_back(run(run_config));
      }
      emit(simulate_table(reports), common.out_path);
    } else if (*cmd_validate) {
      if (validate_snrs.empty()) validate_snrs = {use_snr};
      auto mode = parse_mode(mode_name);
      std::vector<std::pair<double, ValidationReport>> results;
      bool all_pass = true;
      for (double point_snr : validate_snrs) {
        EvalDetail analytic = evaluate(config, mode.value_or(Mode::kRelay), use_alpha,
                                       point_snr);
        std::vector<SimReport> sims;
        for (int s = 0; s < seeds; ++s) {
          SimConfig sim = sim_config_from(config, mode.value_or(Mode::kRelay));
          sim.alpha = use_alpha;
          sim.snr_db = point_snr;
          sim.seed = config.simulate.seed + s;
          sims.push_back(run(sim));
        }
        ValidationReport report = validate(analytic, sims);
        all_pass = all_pass && report.pass;
        results.emplace_back(point_snr, report);
      }
      emit(validation_table(results), common.out_path);
      if (!all_pass) return kExitModelError;
    }
    return kExitOk;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what()
              << " (best achievable: " << e.best_achievable() << ")\n";
    return kExitInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModelError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModelError;
  }
}

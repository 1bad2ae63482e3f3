#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "relayee/errors.hpp"

namespace relayee {

/// Integer per-slot service counts for one service state: the real-valued
/// rate chi * T_slot split between floor and floor+1 so the mean is exact.
struct ServiceCounts {
  std::vector<std::pair<int, double>> atoms;  // (packets, probability)
  double mean() const;
};

ServiceCounts quantize_service(double rate, double t_slot, int cap);

/// Joint (service-state x buffer-level) slotted Markov chain. States are
/// ordered row-major with the service state outer and the buffer level
/// inner: index(x, q) = x * (M+1) + q.
struct JointChain {
  int num_service_states = 0;  // N
  int buffer_levels = 0;       // M + 1
  Eigen::MatrixXd transition;  // row-stochastic, size (N*(M+1))^2
  std::vector<ServiceCounts> service;  // per service state
  std::vector<double> arrivals;        // per-slot arrival pmf

  int index(int x, int q) const { return x * buffer_levels + q; }
  int size() const { return num_service_states * buffer_levels; }
  int capacity() const { return buffer_levels - 1; }
};

/// Build the chain from the arrival pmf, per-state service rates (quantized
/// internally), and the service-state transition matrix. Buffer update is
/// serve-then-arrive: S_t = min(M, max(0, S_{t-1} - c_x) + a_t), with the
/// full-buffer row absorbing the residual arrival mass.
JointChain build_chain(const std::vector<double>& arrival_pmf,
                       const std::vector<double>& service_rates,
                       const Eigen::MatrixXd& channel_transitions, int buffer_capacity,
                       double t_slot = 1.0);

struct IrreducibilityResult {
  bool irreducible = false;
  /// When reducible: a pair (from, to) of flat state indices with no path.
  std::pair<int, int> witness{-1, -1};
};

/// Strong connectivity of the directed graph of nonzero transitions.
IrreducibilityResult is_irreducible(const JointChain& chain);

struct StationaryDistribution {
  Eigen::VectorXd pi;
  double residual = 0.0;     // max-norm of pi*T - pi
  std::string method;        // "direct" or "power"
};

/// Stationary distribution by direct linear solve (one balance equation
/// replaced by the normalization). Falls back to power iteration when the
/// solve is ill-conditioned; throws on reducible chains.
StationaryDistribution stationary(const JointChain& chain);

/// Plain power iteration, stopping at `tol` in max-norm or `max_iters`.
Eigen::VectorXd power_iteration(const JointChain& chain, long max_iters = 100000,
                                double tol = 1e-12);

/// (buffer-level marginal, service-state marginal); both sum to 1.
std::pair<std::vector<double>, std::vector<double>> marginals(const Eigen::VectorXd& pi,
                                                              const JointChain& chain);

/// Distribution of per-slot departures min(S_{t-1}, c_x) under pi.
std::vector<double> departure_pmf(const JointChain& chain, const Eigen::VectorXd& pi);

}  // namespace relayee

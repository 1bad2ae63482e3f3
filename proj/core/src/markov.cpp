#include "relayee/markov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace relayee {

double ServiceCounts::mean() const {
  double m = 0.0;
  for (const auto& [c, p] : atoms) m += c * p;
  return m;
}

ServiceCounts quantize_service(double rate, double t_slot, int cap) {
  if (rate < 0.0) throw InvalidParameterError("service rate must be nonnegative");
  double x = std::min(rate * t_slot, static_cast<double>(cap));
  int lo = static_cast<int>(std::floor(x));
  double frac = x - lo;
  ServiceCounts counts;
  if (frac < 1e-12 || lo >= cap) {
    counts.atoms.emplace_back(lo, 1.0);
  } else {
    counts.atoms.emplace_back(lo, 1.0 - frac);
    counts.atoms.emplace_back(lo + 1, frac);
  }
  return counts;
}

JointChain build_chain(const std::vector<double>& arrival_pmf,
                       const std::vector<double>& service_rates,
                       const Eigen::MatrixXd& channel_transitions, int buffer_capacity,
                       double t_slot) {
  const int n = static_cast<int>(service_rates.size());
  if (channel_transitions.rows() != n || channel_transitions.cols() != n) {
    throw InvalidParameterError("channel transition matrix does not match the service states");
  }
  if (arrival_pmf.empty()) throw InvalidParameterError("arrival pmf is empty");
  if (buffer_capacity < 0) throw InvalidParameterError("buffer capacity must be nonnegative");

  JointChain chain;
  chain.num_service_states = n;
  chain.buffer_levels = buffer_capacity + 1;
  chain.arrivals = arrival_pmf;
  chain.service.reserve(n);
  for (double rate : service_rates) {
    chain.service.push_back(quantize_service(rate, t_slot, buffer_capacity));
  }

  const int m = buffer_capacity;
  const int levels = chain.buffer_levels;
  chain.transition = Eigen::MatrixXd::Zero(chain.size(), chain.size());

  auto arrival = [&](int a) -> double {
    return (a >= 0 && a < static_cast<int>(arrival_pmf.size())) ? arrival_pmf[a] : 0.0;
  };

  std::vector<double> kernel(levels);
  for (int x = 0; x < n; ++x) {
    for (int q = 0; q < levels; ++q) {
      std::fill(kernel.begin(), kernel.end(), 0.0);
      for (const auto& [c, pc] : chain.service[x].atoms) {
        const int base = std::max(0, q - c);
        double below_cap = 0.0;
        for (int l = base; l < m; ++l) {
          double pa = arrival(l - base);
          kernel[l] += pc * pa;
          below_cap += pa;
        }
        kernel[m] += pc * (1.0 - below_cap);  // full-buffer row absorbs the rest
      }
      const int row = chain.index(x, q);
      for (int y = 0; y < n; ++y) {
        const double py = channel_transitions(x, y);
        if (py == 0.0) continue;
        for (int l = 0; l < levels; ++l) {
          if (kernel[l] != 0.0) chain.transition(row, chain.index(y, l)) = py * kernel[l];
        }
      }
    }
  }
  return chain;
}

namespace {

// Iterative DFS reachability over nonzero transitions.
std::vector<bool> reachable(const Eigen::MatrixXd& t, int start, bool reverse) {
  const int n = static_cast<int>(t.rows());
  std::vector<bool> seen(n, false);
  std::vector<int> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < n; ++w) {
      double p = reverse ? t(w, v) : t(v, w);
      if (p > 0.0 && !seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

IrreducibilityResult is_irreducible(const JointChain& chain) {
  IrreducibilityResult result;
  const auto fwd = reachable(chain.transition, 0, false);
  for (int v = 0; v < chain.size(); ++v) {
    if (!fwd[v]) {
      result.witness = {0, v};
      return result;
    }
  }
  const auto back = reachable(chain.transition, 0, true);
  for (int v = 0; v < chain.size(); ++v) {
    if (!back[v]) {
      result.witness = {v, 0};
      return result;
    }
  }
  result.irreducible = true;
  return result;
}

namespace {

double stationary_residual(const Eigen::VectorXd& pi, const Eigen::MatrixXd& t) {
  return (t.transpose() * pi - pi).cwiseAbs().maxCoeff();
}

// Kosaraju strongly-connected components over nonzero transitions.
std::vector<int> scc_labels(const Eigen::MatrixXd& t, int& count) {
  const int n = static_cast<int>(t.rows());
  std::vector<int> order;
  order.reserve(n);
  std::vector<bool> seen(n, false);
  std::vector<std::pair<int, int>> stack;  // (node, next neighbor)
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    stack.emplace_back(s, 0);
    seen[s] = true;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      bool descended = false;
      for (int w = next; w < n; ++w) {
        if (t(v, w) > 0.0 && !seen[w]) {
          next = w + 1;
          seen[w] = true;
          stack.emplace_back(w, 0);
          descended = true;
          break;
        }
      }
      if (!descended) {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<int> label(n, -1);
  count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (label[*it] >= 0) continue;
    std::vector<int> dfs{*it};
    label[*it] = count;
    while (!dfs.empty()) {
      int v = dfs.back();
      dfs.pop_back();
      for (int w = 0; w < n; ++w) {
        if (t(w, v) > 0.0 && label[w] < 0) {
          label[w] = count;
          dfs.push_back(w);
        }
      }
    }
    ++count;
  }
  return label;
}

// A unique stationary distribution needs exactly one closed class; other
// states are transient and carry zero mass.
int closed_class_count(const Eigen::MatrixXd& t) {
  int count = 0;
  const auto label = scc_labels(t, count);
  const int n = static_cast<int>(t.rows());
  std::vector<bool> closed(count, true);
  for (int v = 0; v < n; ++v) {
    for (int w = 0; w < n; ++w) {
      if (t(v, w) > 0.0 && label[w] != label[v]) closed[label[v]] = false;
    }
  }
  int total = 0;
  for (bool c : closed) total += c;
  return total;
}

}  // namespace

Eigen::VectorXd power_iteration(const JointChain& chain, long max_iters, double tol) {
  const int n = chain.size();
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
  const Eigen::MatrixXd tt = chain.transition.transpose();
  for (long it = 0; it < max_iters; ++it) {
    Eigen::VectorXd next = tt * pi;
    next /= next.sum();
    double delta = (next - pi).cwiseAbs().maxCoeff();
    pi = std::move(next);
    if (delta < tol) break;
  }
  return pi;
}

StationaryDistribution stationary(const JointChain& chain) {
  // Transient states (e.g. buffer levels the bounded arrival process can
  // never refill) are fine; multiple closed classes are not.
  const int closed = closed_class_count(chain.transition);
  if (closed != 1) {
    const auto irr = is_irreducible(chain);
    throw ModelError("chain has " + std::to_string(closed) +
                     " closed classes, stationary distribution not unique (state " +
                     std::to_string(irr.witness.first) + " cannot reach state " +
                     std::to_string(irr.witness.second) + ")");
  }
  const int n = chain.size();
  Eigen::MatrixXd a = chain.transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();  // replace one balance equation with normalization
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;

  StationaryDistribution result;
  result.pi = a.partialPivLu().solve(rhs);
  // Clean up solver noise.
  for (int i = 0; i < n; ++i) {
    if (result.pi(i) < 0.0 && result.pi(i) > -1e-12) result.pi(i) = 0.0;
  }
  result.pi /= result.pi.sum();
  result.residual = stationary_residual(result.pi, chain.transition);
  result.method = "direct";
  if (!(result.residual <= 1e-10) || result.pi.minCoeff() < 0.0) {
    result.pi = power_iteration(chain);
    result.residual = stationary_residual(result.pi, chain.transition);
    result.method = "power";
    if (!(result.residual <= 1e-8)) {
      throw NumericError("stationary distribution did not converge", result.residual);
    }
  }
  return result;
}

std::pair<std::vector<double>, std::vector<double>> marginals(const Eigen::VectorXd& pi,
                                                              const JointChain& chain) {
  std::vector<double> buffer(chain.buffer_levels, 0.0);
  std::vector<double> service(chain.num_service_states, 0.0);
  for (int x = 0; x < chain.num_service_states; ++x) {
    for (int q = 0; q < chain.buffer_levels; ++q) {
      double p = pi(chain.index(x, q));
      buffer[q] += p;
      service[x] += p;
    }
  }
  return {buffer, service};
}

std::vector<double> departure_pmf(const JointChain& chain, const Eigen::VectorXd& pi) {
  int max_service = 0;
  for (const auto& counts : chain.service) {
    for (const auto& [c, p] : counts.atoms) max_service = std::max(max_service, c);
  }
  std::vector<double> pmf(max_service + 1, 0.0);
  for (int x = 0; x < chain.num_service_states; ++x) {
    for (int q = 0; q < chain.buffer_levels; ++q) {
      const double p = pi(chain.index(x, q));
      if (p == 0.0) continue;
      for (const auto& [c, pc] : chain.service[x].atoms) {
        pmf[std::min(q, c)] += p * pc;
      }
    }
  }
  return pmf;
}

}  // namespace relayee

#include <doctest.h>

#include <cmath>

#include "relayee/markov.hpp"
#include "relayee/metrics.hpp"
#include "relayee/queueing.hpp"

using namespace relayee;

namespace {

JointChain chain_from_matrix(const Eigen::MatrixXd& t) {
  JointChain chain;
  chain.num_service_states = static_cast<int>(t.rows());
  chain.buffer_levels = 1;
  chain.transition = t;
  chain.service.resize(t.rows());
  for (auto& s : chain.service) s.atoms = {{0, 1.0}};
  chain.arrivals = {1.0};
  return chain;
}

const EvalDetail& default_relay_detail() {
  static ModelConfig config = default_config();
  static EvalDetail detail = evaluate_relay(config, 0.5, 5.0);
  return detail;
}

}  // namespace

TEST_CASE("service quantization preserves the mean") {
  auto counts = quantize_service(2.0, 1.0, 50);
  REQUIRE(counts.atoms.size() == 1);
  CHECK(counts.atoms[0].first == 2);
  CHECK(counts.mean() == doctest::Approx(2.0));

  counts = quantize_service(1.7, 1.0, 50);
  REQUIRE(counts.atoms.size() == 2);
  CHECK(counts.mean() == doctest::Approx(1.7).epsilon(1e-12));

  // Rates beyond the buffer capacity are clamped.
  counts = quantize_service(120.0, 1.0, 50);
  CHECK(counts.atoms.size() == 1);
  CHECK(counts.atoms[0].first == 50);
}

TEST_CASE("frozen system: identity transition") {
  JointChain chain = build_chain({1.0}, {0.0, 0.0}, Eigen::MatrixXd::Identity(2, 2), 3);
  CHECK(chain.transition.isApprox(Eigen::MatrixXd::Identity(chain.size(), chain.size()),
                                  1e-15));
}

TEST_CASE("two-state hand solve") {
  // One service state, buffer {0, 1}, half-half arrivals of 0 or 1,
  // one packet served per slot: the chain is uniform.
  JointChain chain = build_chain({0.5, 0.5}, {1.0}, Eigen::MatrixXd::Identity(1, 1), 1);
  REQUIRE(chain.size() == 2);
  CHECK(chain.transition(0, 0) == doctest::Approx(0.5));
  CHECK(chain.transition(0, 1) == doctest::Approx(0.5));
  CHECK(chain.transition(1, 0) == doctest::Approx(0.5));
  CHECK(chain.transition(1, 1) == doctest::Approx(0.5));
  auto pi = stationary(chain);
  CHECK(pi.pi(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pi.pi(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("default chain is row-stochastic with 357 states") {
  const auto& detail = default_relay_detail();
  REQUIRE(detail.source_chain.size() == 7 * 51);
  for (int i = 0; i < detail.source_chain.size(); ++i) {
    CHECK(detail.source_chain.transition.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(detail.source_chain.transition.row(i).minCoeff() >= 0.0);
  }
}

TEST_CASE("irreducibility") {
  auto identity = chain_from_matrix(Eigen::MatrixXd::Identity(3, 3));
  auto result = is_irreducible(identity);
  CHECK_FALSE(result.irreducible);

  const auto& detail = default_relay_detail();
  CHECK(is_irreducible(detail.source_chain).irreducible);
  CHECK(is_irreducible(detail.relay_chain).irreducible);

  // Disconnected channel matrix: the blocks cannot communicate. (Arrivals
  // reach every buffer level so the only cut is across channel blocks.)
  Eigen::MatrixXd blocks = Eigen::MatrixXd::Zero(2, 2);
  blocks(0, 0) = 1.0;
  blocks(1, 1) = 1.0;
  JointChain broken = build_chain({0.25, 0.5, 0.25}, {1.0, 1.0}, blocks, 2);
  auto verdict = is_irreducible(broken);
  CHECK_FALSE(verdict.irreducible);
  const int levels = broken.buffer_levels;
  CHECK(verdict.witness.first / levels != verdict.witness.second / levels);

  // Sanity: the same chain with a mixing channel matrix is irreducible.
  Eigen::MatrixXd mixing(2, 2);
  mixing << 0.9, 0.1, 0.1, 0.9;
  CHECK(is_irreducible(build_chain({0.25, 0.5, 0.25}, {1.0, 1.0}, mixing, 2)).irreducible);
}

TEST_CASE("stationary hand solves") {
  Eigen::MatrixXd t(2, 2);
  t << 0.9, 0.1, 0.5, 0.5;
  auto pi = stationary(chain_from_matrix(t));
  CHECK(pi.pi(0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(pi.pi(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(pi.method == "direct");

  Eigen::MatrixXd doubly(3, 3);
  doubly << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5;
  pi = stationary(chain_from_matrix(doubly));
  for (int i = 0; i < 3; ++i) CHECK(pi.pi(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(stationary(chain_from_matrix(Eigen::MatrixXd::Identity(2, 2))), ModelError);
}

TEST_CASE("direct solve and power iteration agree on the default chain") {
  const auto& detail = default_relay_detail();
  const auto& chain = detail.source_chain;
  auto direct = stationary(chain);
  CHECK(direct.residual <= 1e-10);
  auto power = power_iteration(chain, 100000, 1e-13);
  CHECK((direct.pi - power).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("marginals") {
  JointChain chain = build_chain({0.5, 0.5}, {1.0, 1.0},
                                 Eigen::MatrixXd::Identity(2, 2) * 0.5 +
                                     Eigen::MatrixXd::Constant(2, 2, 0.25),
                                 3);
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(chain.size(), 1.0 / chain.size());
  auto [buffer, service] = marginals(uniform, chain);
  for (double p : buffer) CHECK(p == doctest::Approx(1.0 / chain.buffer_levels));
  for (double p : service) CHECK(p == doctest::Approx(0.5));

  Eigen::VectorXd point = Eigen::VectorXd::Zero(chain.size());
  point(chain.index(1, 2)) = 1.0;
  std::tie(buffer, service) = marginals(point, chain);
  CHECK(buffer[2] == doctest::Approx(1.0));
  CHECK(service[1] == doctest::Approx(1.0));
}

TEST_CASE("service-state marginal matches the channel chain stationary") {
  const auto& detail = default_relay_detail();
  auto [buffer, service] = marginals(detail.source_pi.pi, detail.source_chain);

  // Stationary vector of the censored channel step matrix.
  Eigen::MatrixXd step = slot_transition_matrix(detail.ar, default_config().system.slot_s);
  const int n = static_cast<int>(step.rows());
  Eigen::MatrixXd a = step.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd chan_pi = a.partialPivLu().solve(rhs);

  double l1 = 0.0;
  for (int i = 0; i < n; ++i) l1 += std::abs(service[i] - chan_pi(i));
  CHECK(l1 <= 1e-6);
}

TEST_CASE("chain flow consistency: arrivals - drops = departures") {
  const auto& detail = default_relay_detail();
  const auto& chain = detail.source_chain;
  const auto& pi = detail.source_pi.pi;
  const double lambda = pmf_mean(chain.arrivals);
  const double drops = drop_rate(pi, chain, chain.arrivals) * lambda;
  const double departures = pmf_mean(departure_pmf(chain, pi));
  CHECK(departures == doctest::Approx(lambda - drops).epsilon(1e-6));
}

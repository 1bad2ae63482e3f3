#include <doctest.h>

#include <cmath>
#include <random>

#include "relayee/config.hpp"
#include "relayee/queueing.hpp"
#include "relayee/units.hpp"

using namespace relayee;

namespace {

ModelConfig base_config() {
  ModelConfig config = default_config();
  config.system.slot_s = 1.0;  // keep times in seconds for the hand checks
  return config;
}

}  // namespace

TEST_CASE("packet_times collapses to the pure direct or relayed path") {
  ModelConfig config = base_config();
  auto ar = config.make_link(LinkLabel::kSourceRelay, 5.0);
  auto rd = config.make_link(LinkLabel::kRelayDest, 5.0);
  auto ad = config.make_link(LinkLabel::kDirect, 5.0);

  auto t0 = packet_times(ar, rd, ad, config.system, 0.0);
  auto t1 = packet_times(ar, rd, ad, config.system, 1.0);
  for (std::size_t n = 0; n < t0.eps.size(); ++n) {
    CHECK(t0.eps[n] == doctest::Approx(t0.tau_direct[n]).epsilon(1e-12));
    CHECK(t1.eps[n] == doctest::Approx(t1.tau_relayed[n]).epsilon(1e-12));
  }
}

TEST_CASE("packet transmission time with full access") {
  // L = 100 bits, b = 2, Rs = 1e5 symbols/s, full availability: 0.5 ms.
  ModelConfig config = base_config();
  config.access_ar = {1e9, 1e-9};
  config.access_rd = {1e9, 1e-9};
  config.access_ad = {1e9, 1e-9};
  auto ar = config.make_link(LinkLabel::kSourceRelay, 5.0);
  auto rd = config.make_link(LinkLabel::kRelayDest, 5.0);
  auto ad = config.make_link(LinkLabel::kDirect, 5.0);
  auto t = packet_times(ar, rd, ad, config.system, 0.0);
  CHECK(t.tau_direct[1] == doctest::Approx(5e-4).epsilon(1e-9));
}

TEST_CASE("starved link raises an error") {
  ModelConfig config = base_config();
  auto ar = config.make_link(LinkLabel::kSourceRelay, 5.0);
  auto rd = config.make_link(LinkLabel::kRelayDest, 5.0);
  auto ad = config.make_link(LinkLabel::kDirect, 5.0);
  ad.access.q = 0.0;  // availability collapses to zero
  CHECK_THROWS_AS(packet_times(ar, rd, ad, config.system, 0.5), ModelError);
}

TEST_CASE("service time pmf") {
  auto pmf = service_time_pmf(2.0, 3.0, 0.0, 6);
  CHECK(pmf.masses[0] == doctest::Approx(1.0));
  for (int t = 1; t <= 6; ++t) CHECK(pmf.masses[t] == 0.0);
  CHECK(pmf.drop_probability == 0.0);

  pmf = service_time_pmf(2.0, 3.0, 0.5, 1);
  REQUIRE(pmf.masses.size() == 2);
  CHECK(pmf.masses[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pmf.masses[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pmf.drop_probability == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(service_time_pmf(2.0, 3.0, 1.0, 6), ModelError);
}

TEST_CASE("pmf masses sum to one") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double p = 0.999 * u(rng);
    const int k = 1 + static_cast<int>(u(rng) * 10);
    auto pmf = service_time_pmf(0.1 + u(rng), 0.1 + u(rng), p, k);
    double total = 0.0;
    for (double m : pmf.masses) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("expected service time matches the brute-force sum") {
  CHECK(expected_service_time(2.0, 3.0, 0.0, 6) == doctest::Approx(2.0).epsilon(1e-15));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double eps = 0.01 + 2.0 * u(rng);
    const double eps_bar = 0.01 + 2.0 * u(rng);
    const double p = 0.98 * u(rng);
    const int k = 1 + static_cast<int>(u(rng) * 12);
    double brute = 0.0;
    double geom = 1.0;
    for (int t = 0; t <= k; ++t) {
      brute += (eps + t * eps_bar) * (1.0 - p) * geom;
      geom *= p;
    }
    const double closed = expected_service_time(eps, eps_bar, p, k);
    CHECK(closed == doctest::Approx(brute).epsilon(1e-12));
    // ... and the pmf expectation is the same quantity.
    CHECK(service_time_pmf(eps, eps_bar, p, k).mean() ==
          doctest::Approx(closed).epsilon(1e-12));
  }

  // More retries lengthen the service until the retry cap dominates: with
  // max_tx = 6 the mean rises on [0, ~0.7] and then falls because the
  // exhausted-retries mass (p^7) leaves the truncated sum.
  double prev = 0.0;
  for (double p = 0.0; p <= 0.651; p += 0.05) {
    const double v = expected_service_time(1.0, 1.5, p, 6);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(expected_service_time(1.0, 1.5, 0.95, 6) <
        expected_service_time(1.0, 1.5, 0.75, 6));
  CHECK_THROWS_AS(expected_service_time(1.0, 1.0, 1.0, 6), ModelError);
}

TEST_CASE("service rates: zero-error limits and pmf oracle") {
  ModelConfig config = base_config();
  auto ar = config.make_link(LinkLabel::kSourceRelay, 5.0);
  auto rd = config.make_link(LinkLabel::kRelayDest, 5.0);
  auto ad = config.make_link(LinkLabel::kDirect, 5.0);
  auto times = packet_times(ar, rd, ad, config.system, 0.0);

  auto profile = source_profile(times, 0.0, config.system.max_tx, 0.53);
  auto rates = profile.rates();
  for (std::size_t n = 0; n < rates.size(); ++n) {
    CHECK(rates[n] == doctest::Approx(0.53 / times.eps[n]).epsilon(1e-12));
  }

  auto relay = relay_profile(rd, config.system, 0.0, config.system.max_tx, 1.0 - 1e-9);
  for (double chi : relay.rates()) CHECK(chi <= 1e-5);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = 0.01 + 0.98 * u(rng);
    const double eps = 0.01 + u(rng);
    const double eps_bar = 0.01 + u(rng);
    const double p = 0.98 * u(rng);
    const int k = 1 + static_cast<int>(u(rng) * 10);
    ServiceProfile prof;
    prof.eps = {eps};
    prof.eps_bar = eps_bar;
    prof.p_err = p;
    prof.max_tx = k;
    prof.phase_fraction = alpha;
    CHECK(prof.rate(1) ==
          doctest::Approx(alpha / service_time_pmf(eps, eps_bar, p, k).mean())
              .epsilon(1e-12));
  }
}

TEST_CASE("service rates are nondecreasing across modes") {
  ModelConfig config = default_config();
  auto ar = config.make_link(LinkLabel::kSourceRelay, 5.0);
  auto rd = config.make_link(LinkLabel::kRelayDest, 5.0);
  auto ad = config.make_link(LinkLabel::kDirect, 5.0);
  auto times = packet_times(ar, rd, ad, config.system, 0.3);
  auto rates = source_profile(times, 0.05, config.system.max_tx, 0.5).rates();
  for (std::size_t n = 1; n < rates.size(); ++n) CHECK(rates[n] >= rates[n - 1]);
}

TEST_CASE("service rates are invariant under (L, Rs) scaling") {
  ModelConfig config = default_config();
  auto rates_for = [&](int l, double rs) {
    ModelConfig local = config;
    local.system.packet_bits = l;
    local.system.symbol_rate_hz = rs;
    auto ar = local.make_link(LinkLabel::kSourceRelay, 5.0);
    auto rd = local.make_link(LinkLabel::kRelayDest, 5.0);
    auto ad = local.make_link(LinkLabel::kDirect, 5.0);
    auto times = packet_times(ar, rd, ad, local.system, 0.3);
    return source_profile(times, 0.05, local.system.max_tx, 0.5).rates();
  };
  auto a = rates_for(100, 1e5);
  auto b = rates_for(700, 7e5);
  for (std::size_t n = 0; n < a.size(); ++n) {
    CHECK(a[n] == doctest::Approx(b[n]).epsilon(1e-12));
  }
}

TEST_CASE("source rate grows with alpha, relay rate shrinks") {
  ModelConfig config = default_config();
  auto ar = config.make_link(LinkLabel::kSourceRelay, 5.0);
  auto rd = config.make_link(LinkLabel::kRelayDest, 5.0);
  auto ad = config.make_link(LinkLabel::kDirect, 5.0);
  auto times = packet_times(ar, rd, ad, config.system, 0.3);
  double prev_src = 0.0;
  double prev_rly = 1e18;
  for (double alpha : {0.2, 0.4, 0.6, 0.8}) {
    const double src = source_profile(times, 0.05, 6, alpha).rate(1);
    const double rly = relay_profile(rd, config.system, 0.05, 6, alpha).rate(1);
    CHECK(src > prev_src);
    CHECK(rly < prev_rly);
    prev_src = src;
    prev_rly = rly;
  }
}

TEST_CASE("arrival pmf") {
  TrafficModel tiny{1e-12, 15, {}, {}};
  auto pmf = arrival_pmf(tiny);
  CHECK(pmf[0] == doctest::Approx(1.0).epsilon(1e-10));

  TrafficModel unit{1.0, 15, {}, {}};
  pmf = arrival_pmf(unit);
  CHECK(pmf[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(pmf_mean(pmf) == doctest::Approx(1.0).epsilon(1e-6));
  double total = 0.0;
  for (double p : pmf) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mmpp stationary mixture mean") {
  TrafficModel traffic;
  traffic.mean_rate = 0.0;
  traffic.max_arrivals = 15;
  traffic.mmpp_rates = {1.0, 2.0};
  traffic.mmpp_switch = {{0.9, 0.1}, {0.3, 0.7}};
  // Stationary split of the switch chain is (0.75, 0.25).
  CHECK(traffic.effective_mean() == doctest::Approx(0.75 * 1.0 + 0.25 * 2.0).epsilon(1e-9));
}

TEST_CASE("relay arrival pmf: idle and saturated source") {
  // Source with no arrivals: all mass sits at buffer 0, departures are a
  // point mass at zero.
  JointChain chain = build_chain({1.0}, {2.0}, Eigen::MatrixXd::Identity(1, 1), 4);
  StationaryDistribution pi;
  pi.pi = Eigen::VectorXd::Zero(chain.size());
  pi.pi(chain.index(0, 0)) = 1.0;
  auto pmf = relay_arrival_pmf(chain, pi);
  CHECK(pmf[0] == doctest::Approx(1.0).epsilon(1e-12));

  // Saturated source with integer service 2: departures are always 2.
  std::vector<double> burst(7, 0.0);
  burst[6] = 1.0;  // six arrivals every slot
  chain = build_chain(burst, {2.0}, Eigen::MatrixXd::Identity(1, 1), 4);
  pi.pi = Eigen::VectorXd::Zero(chain.size());
  pi.pi(chain.index(0, 4)) = 1.0;  // buffer pinned at capacity
  pmf = relay_arrival_pmf(chain, pi);
  REQUIRE(pmf.size() >= 3);
  CHECK(pmf[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("relay arrival pmf mean equals the accepted source rate") {
  // Flow conservation through the source queue, checked on a small chain.
  std::vector<double> arrivals = arrival_pmf(TrafficModel{1.3, 8, {}, {}});
  Eigen::MatrixXd channel(2, 2);
  channel << 0.9, 0.1, 0.2, 0.8;
  JointChain chain = build_chain(arrivals, {0.7, 1.9}, channel, 6);
  auto pi = stationary(chain);
  auto dep = relay_arrival_pmf(chain, pi);

  // Mean departures = mean arrivals - mean drops.
  const double lambda = pmf_mean(arrivals);
  double dropped = 0.0;
  for (int x = 0; x < chain.num_service_states; ++x) {
    for (int q = 0; q < chain.buffer_levels; ++q) {
      const double p = pi.pi(chain.index(x, q));
      for (const auto& [c, pc] : chain.service[x].atoms) {
        const int space = chain.capacity() - std::max(0, q - c);
        for (int a = space + 1; a < static_cast<int>(arrivals.size()); ++a) {
          dropped += p * pc * arrivals[a] * (a - space);
        }
      }
    }
  }
  CHECK(pmf_mean(dep) == doctest::Approx(lambda - dropped).epsilon(1e-9));
}

TEST_CASE("paper-hybrid relay arrivals normalize") {
  TrafficModel traffic{1.0, 15, {}, {}};
  auto pmf = relay_arrival_pmf_hybrid({0.7, 1.9, 2.4}, {0.5, 0.3, 0.2}, traffic, 1.0);
  double total = 0.0;
  for (double p : pmf) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

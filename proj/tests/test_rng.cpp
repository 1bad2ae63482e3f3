#include <doctest.h>

#include <cmath>

#include "relayee/rng.hpp"

using namespace relayee;

TEST_CASE("philox4x32-10 known-answer vectors") {
  auto out = Philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  out = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu});
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  out = Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u});
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("streams are independent and reproducible") {
  Philox a(42, 0);
  Philox b(42, 0);
  Philox c(42, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    auto va = a.next_u32();
    CHECK(va == b.next_u32());
    if (va != c.next_u32()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("uniform moments") {
  Philox rng(7, 0);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("poisson sampler matches its mean") {
  Philox rng(11, 3);
  const double mean = 2.5;
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += rng.poisson(mean);
  CHECK(acc / n == doctest::Approx(mean).epsilon(0.01));
}

TEST_CASE("exponential sampler matches its rate") {
  Philox rng(11, 4);
  const double rate = 3.0;
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += rng.exponential(rate);
  CHECK(acc / n == doctest::Approx(1.0 / rate).epsilon(0.02));
}

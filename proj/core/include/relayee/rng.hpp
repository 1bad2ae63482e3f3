#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace relayee {

/// Philox4x32-10 counter-based generator.
///
/// Each subsystem of the simulator owns its own stream (see StreamId), keyed
/// by (seed, stream). Draws are a pure function of (seed, stream, counter),
/// so runs are reproducible and per-subsystem variance can be isolated by
/// switching one stream's seed at a time.
class Philox {
 public:
  Philox() = default;
  Philox(std::uint64_t seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}

  /// One 4x32 block for an explicit counter; stateless.
  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                            const std::array<std::uint32_t, 2>& key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  bool bernoulli(double p);
  /// Exponential with rate lambda (mean 1/lambda).
  double exponential(double rate);
  /// Inversion sampler; intended for small means (arrival processes).
  int poisson(double mean);
  /// Sample an index from a discrete pmf (values need not be normalized).
  int discrete(const std::vector<double>& weights);

  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_ = 0;
  std::uint32_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int have_ = 0;
};

/// Simulator stream assignment, one Philox per subsystem.
enum class StreamId : std::uint32_t {
  kArrivals = 0,
  kFadingSource = 1,
  kFadingRelay = 2,
  kFadingDirect = 3,
  kOccupancyAR = 4,
  kOccupancyRD = 5,
  kOccupancyAD = 6,
  kErrors = 7,
  kSnrSamples = 8,
  kTraffic = 9,
};

inline Philox make_stream(std::uint64_t seed, StreamId id) {
  return Philox(seed, static_cast<std::uint32_t>(id));
}

}  // namespace relayee

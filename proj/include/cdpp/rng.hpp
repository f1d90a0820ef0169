#pragma once

#include <cstdint>
#include <random>

namespace cdpp {

// One independent pseudo-random stream per run. The engine state is a pure
// function of (seed, stream_id), so a run reproduces its draws no matter how
// many other streams are in flight or in which order they execute.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  engine_type& engine() noexcept { return engine_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in the closed range [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
  }

  double normal() { return normal_(engine_); }

  // Derive a child stream, e.g. one per replica inside a scenario.
  RngStream split(std::uint64_t child) const {
    return RngStream(seed_ ^ (0xd1b54a32d192ed03ULL * (stream_id_ + 1)), child);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cdpp

#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace mallows {

// Deterministic stream keyed by (master seed, stream index).
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return eng_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  // Uniform on the open interval (0,1).
  double uniform_open() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
  // Uniform integer in [1, k].
  std::int64_t uniform_int(std::int64_t k) {
    return std::uniform_int_distribution<std::int64_t>(1, k)(eng_);
  }

 private:
  std::mt19937_64 eng_;
};

inline RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6d616c6cu};
  eng_.seed(seq);
}

}  // namespace mallows

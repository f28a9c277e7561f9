#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace rq::rng {

// All randomness in the project flows from a single 64-bit config seed.
// Sub-streams are derived as  derive(seed, tag, index)  where `tag` names the
// consumer ("chain", "embed", "tune", "cell:<experiment>", ...) and `index`
// separates replicates/rungs. The scheme is documented here and must not be
// changed without bumping the output-format version: every persisted artifact
// depends on it byte-for-byte.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ fnv1a64(tag)) + index);
}

// xoshiro256++ (Blackman & Vigna, public domain reference implementation),
// seeded via splitmix64 expansion. Chosen over std::mt19937_64 so that
// streams are bit-reproducible across standard libraries.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x = splitmix64(x);
      word = x;
    }
    has_spare_ = false;
    spare_ = 0.0;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1], safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform01(); }

  // Standard normal via the Marsaglia polar method; the spare deviate is
  // cached, so draws come in deterministic per-stream order.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_;
  double spare_;
  bool has_spare_;
};

inline Stream stream(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  return Stream(derive(seed, tag, index));
}

}  // namespace rq::rng

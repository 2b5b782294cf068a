#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ltforge {

/// Seeded generator used for every sampled check. Draws are built directly on
/// std::mt19937_64 output (rejection sampling, no std distributions), so a
/// fixed seed gives identical draws on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::mt19937_64 engine_;
};

/// Seed for an independent stream named `label` under `seed`. seed_seq's
/// mixing is fixed by the standard, so this is portable.
inline std::uint64_t derive_seed(std::uint64_t seed, const std::string& label) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (unsigned char ch : label) words.push_back(ch);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace ltforge

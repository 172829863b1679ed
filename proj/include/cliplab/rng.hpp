#pragma once

#include <array>
#include <cstdint>

namespace cliplab {

/// SplitMix64 step. Used to expand a 64-bit seed into generator state and to
/// derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives a seed for a named sub-stream without advancing any generator.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// xoshiro256** seeded through SplitMix64.
///
/// Stream layout, so that other implementations reproduce identical draws:
///   - state[k] = splitmix64(s) for k = 0..3, starting from s = seed;
///   - uniform() = (next() >> 11) * 2^-53, in [0, 1);
///   - normal() consumes exactly two uniforms u1, u2 and returns
///     sqrt(-2 ln(1 - u1)) * cos(2 pi u2) (Box-Muller, cosine branch only);
///   - index(n) = floor(uniform() * n).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();
  /// Uniform in (0, 1].
  double uniform_open_zero();
  double normal();
  std::uint64_t index(std::uint64_t n);

 private:
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace cliplab

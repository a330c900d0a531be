#pragma once

#include <array>
#include <cstdint>

namespace wishmix {

// Seedable, splittable 64-bit generator (xoshiro256++ seeded via splitmix64).
// All variate recipes are fixed here rather than delegated to <random> so a
// seed pins the byte-exact output stream across compilers and platforms.
// Generators are cheap values; never share one across threads, split instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from (seed, stream); used for replicate farms.
  static Rng from_stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53-bit resolution.
  double uniform();

  // Uniform on (0,1); safe to pass to log().
  double uniform_open();

  double normal();                  // standard normal, Box-Muller, 2 uniforms
  double gamma(double shape);       // unit-scale gamma, Marsaglia-Tsang
  double chi_squared(double dof);   // 2 * gamma(dof/2)

  // Child generator with an independent stream; advances this generator.
  Rng split();

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace wishmix

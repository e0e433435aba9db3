#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace ipdyn {

// Deterministic RNG with explicit variate transforms. The standard library
// distributions are implementation-defined, so every transform is spelled out
// here; a given (seed, call sequence) reproduces the same values on every
// platform that shares the mt19937_64 engine.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  // Independent substream for parallel work: stream k of a run seeded with
  // `seed` is a pure function of (seed, k), never of execution order.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed) ^ mix(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + uniform() * (b - a); }

  // Standard normal via Box-Muller (two uniforms per variate, no cached spare,
  // so the stream position after n calls is always 2n draws).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Categorical draw over {1, 2, 3} with the given probabilities.
  int categorical3(const std::array<double, 3>& p) {
    const double u = uniform();
    if (u < p[0]) return 1;
    if (u < p[0] + p[1]) return 2;
    return 3;
  }

private:
  // splitmix64 finalizer; spreads low-entropy seeds over the engine state.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace ipdyn

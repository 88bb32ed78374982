#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace olrnn {

// splitmix64 finalizer. Fixed constants; every stream in the project is a
// deterministic function of a 64-bit seed, independent of platform libc rand.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based generator: state advances by the golden-ratio increment and
// each output is the splitmix64 hash of the counter. Identical seed gives an
// identical draw stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Independent child stream.
  Rng split() { return Rng(next_u64() ^ 0xD1B54A32D192ED03ull); }

  // Stream addressed by (seed, index): pure function, no shared state.
  // Used for per-step task noise so samples can be regenerated at any t.
  static Rng at(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix64(mix64(seed) + index));
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace olrnn

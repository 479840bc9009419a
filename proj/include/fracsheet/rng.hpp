#pragma once

#include <cmath>
#include <cstdint>

namespace fracsheet::rng {

// SplitMix64 mixer (Steele-Lea-Flood). Chosen over <random> engines because
// the byte-identical-rerun guarantee needs a fully specified generator and
// normal transform; std::normal_distribution's algorithm is
// implementation-defined.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0,1]; never 0, so safe under log.
  double next_unit() { return ((next() >> 11) + 1) * 0x1.0p-53; }
};

// Standard normals by Box-Muller with the usual cached spare.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : u_(seed) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(u_.next_unit()));
    double a = 2.0 * kPi * u_.next_unit();
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  SplitMix64 u_;
  bool have_ = false;
  double spare_ = 0.0;
};

// Counter-based derivation: any worker can seed path k without coordination.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
  return SplitMix64(master + 0x9E3779B97F4A7C15ULL * (k + 1)).next();
}

}  // namespace fracsheet::rng

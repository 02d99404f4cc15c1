#pragma once

#include <cstdint>
#include <random>

namespace camo {

// mt19937_64 with hand-rolled value mappings. The standard pins the engine's
// output sequence but not the distributions, so uniform/gaussian draws are
// implemented here to keep seeded runs reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller with the sine partner cached.
  double gaussian(double mean, double sigma);

  // Uniform index in [0, n) via the multiply-shift reduction.
  std::uint32_t uniform_index(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<__uint128_t>(engine_()) * n) >> 64);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stateless splitmix64 finalizer; used to derive per-trial seeds.
std::uint64_t mix64(std::uint64_t x);

// Cell seed = chained mix of (master, cell index, trial index). Documented in
// the README so published results can name the exact seed of any trial.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                          std::uint64_t trial);

}  // namespace camo

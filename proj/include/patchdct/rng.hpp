#ifndef PATCHDCT_RNG_HPP
#define PATCHDCT_RNG_HPP

#include <cstdint>
#include <random>

namespace patchdct {

/// Seeded generator with a platform-stable output stream.
///
/// The engine is std::mt19937_64, whose sequence the standard pins down.
/// Doubles and normals are derived here rather than through <random>
/// distributions, which are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

  /// Child stream seed for stream `index` (splitmix64 of seed and index).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace patchdct

#endif  // PATCHDCT_RNG_HPP

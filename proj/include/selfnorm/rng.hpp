#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace selfnorm {

/// Deterministic random stream keyed by a master seed and a substream key.
///
/// Two streams built from the same (seed, key) produce bit-identical draws;
/// streams with different keys are statistically independent for practical
/// purposes. Each replicate of an experiment owns its own stream, so results
/// do not depend on scheduling.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> key);
  RandomStream(std::uint64_t seed, const std::vector<std::uint64_t>& key);

  std::uint64_t bits() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Substream tags keep the key spaces of different consumers apart.
enum class StreamTag : std::uint64_t {
  Path = 1,
  Fbm = 2,
  Reference = 3,
  Misc = 4,
};

}  // namespace selfnorm

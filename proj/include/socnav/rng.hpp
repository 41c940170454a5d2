#pragma once

#include <cstdint>
#include <random>

namespace socnav {

/// Seeded generator whose draws are identical on every platform: the engine
/// is fully specified by the standard and the [0,1) mapping is done here.
class Rng
{
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform01() < p; }

  bool operator==(const Rng&) const = default;

private:
  std::mt19937_64 engine_;
};

}  // namespace socnav

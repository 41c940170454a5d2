#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "socnav/clustering.hpp"

namespace corpus {

using V = socnav::Vec2<double>;
using Pts = std::vector<V>;

struct BandwidthCase
{
  const char* name;
  Pts points;
  double quantile;
  double expected;
};

// Expected values worked out by hand from the k-th nearest neighbor rule.
inline const std::vector<BandwidthCase>& bandwidth_cases()
{
  static const std::vector<BandwidthCase> cases{
      {"two pairs", {{0, 0}, {0.1, 0}, {5, 5}, {5.1, 5}}, 0.20, (0.1 + 0.1 + (5.1 - 5.0) + (5.1 - 5.0)) / 4},
      {"single point", {{3, 4}}, 0.20, 0.0},
      {"identical", {{1, 1}, {1, 1}, {1, 1}, {1, 1}}, 0.20, 0.0},
      {"uneven line k1", {{0, 0}, {1, 0}, {3, 0}}, 0.20, (1.0 + 1.0 + 2.0) / 3},
      {"uneven line k clamped", {{0, 0}, {1, 0}, {3, 0}}, 1.0, (3.0 + 2.0 + 3.0) / 3},
      {"square k2", {{0, 0}, {1, 0}, {0, 1}, {1, 1}}, 0.5, 1.0},
      {"square k3", {{0, 0}, {1, 0}, {0, 1}, {1, 1}}, 0.75, std::sqrt(2.0)},
      {"five on a line k2", {{0, 0}, {2, 0}, {4, 0}, {6, 0}, {8, 0}}, 0.4, (4.0 + 2.0 + 2.0 + 2.0 + 4.0) / 5},
      {"ten on a line k2",
       {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}, {7, 0}, {8, 0}, {9, 0}},
       0.20,
       (2.0 + 1 + 1 + 1 + 1 + 1 + 1 + 1 + 1 + 2.0) / 10},
      {"3-4-5 pair", {{0, 0}, {3, 4}}, 0.20, 5.0},
  };
  return cases;
}

/// One to three jittered blobs of n points.
inline Pts random_blobs(std::mt19937_64& gen, int n)
{
  std::uniform_real_distribution<double> center(-3, 3);
  std::normal_distribution<double> jitter(0.0, 0.15);
  std::uniform_int_distribution<int> blobs(1, 3);
  const int k = blobs(gen);
  std::vector<V> centers;
  for (int i = 0; i < k; ++i) centers.emplace_back(center(gen), center(gen));
  Pts pts;
  for (int i = 0; i < n; ++i) pts.push_back(centers[static_cast<std::size_t>(i % k)] + V(jitter(gen), jitter(gen)));
  return pts;
}

/// The 50 small point sets the mean-shift oracle is checked on.
inline std::vector<Pts> meanshift_cases()
{
  std::mt19937_64 gen(32);
  std::vector<Pts> out;
  for (int trial = 0; trial < 50; ++trial) out.push_back(random_blobs(gen, 1 + trial % 8));
  return out;
}

}  // namespace corpus

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "socnav/errors.hpp"
#include "socnav/types.hpp"

namespace socnav {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
struct Cluster
{
  Vec2<Scalar> mean = Vec2<Scalar>::Zero();
  std::vector<std::size_t> members;
  Scalar mean_distance = 0;  // filled by annotate_distances
};

struct MeanShiftParams
{
  int max_iterations = 300;
  double tolerance = 1e-4;  // displacement threshold, relative to bandwidth
};

namespace detail {

template <typename Scalar>
bool lex_less(const Vec2<Scalar>& a, const Vec2<Scalar>& b)
{
  if (a.x() != b.x()) return a.x() < b.x();
  return a.y() < b.y();
}

}  // namespace detail

/// Mean over all points of the distance to their k-th nearest other point,
/// k = max(1, floor(quantile * n)). Zero for a single point.
template <typename Scalar>
Scalar estimate_bandwidth(const std::vector<Vec2<Scalar>>& points, Scalar quantile)
{
  if (points.empty()) throw EmptyInputError("estimate_bandwidth: no points");
  if (!(quantile > 0) || quantile > 1)
    throw ValidationError("estimate_bandwidth: quantile must be in (0, 1]");
  const std::size_t n = points.size();
  if (n == 1) return Scalar(0);

  auto k = static_cast<std::size_t>(std::floor(quantile * static_cast<Scalar>(n) + Scalar(1e-9)));
  k = std::clamp<std::size_t>(k, 1, n - 1);

  Scalar total = 0;
  std::vector<Scalar> dists;
  dists.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    dists.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dists.push_back((points[i] - points[j]).norm());
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k - 1), dists.end());
    total += dists[k - 1];
  }
  return total / static_cast<Scalar>(n);
}

/// Flat-kernel mean shift seeded at every point.
///
/// Seeds climb to the centroid of the points within `bandwidth` until they move
/// less than tolerance * bandwidth. Modes closer than bandwidth / 2 to a
/// stronger mode (more points within bandwidth) are merged away, each point
/// joins its nearest surviving mode, and a cluster's mean is the centroid of
/// its members' converged positions. Output is ordered by size descending,
/// then lexicographically by mean.
template <typename Scalar>
std::vector<Cluster<Scalar>> mean_shift(const std::vector<Vec2<Scalar>>& points, Scalar bandwidth,
                                        const MeanShiftParams& params = {})
{
  if (points.empty()) throw EmptyInputError("mean_shift: no points");
  const std::size_t n = points.size();

  auto order = [](std::vector<Cluster<Scalar>>& cs) {
    std::stable_sort(cs.begin(), cs.end(), [](const Cluster<Scalar>& a, const Cluster<Scalar>& b) {
      if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
      return detail::lex_less(a.mean, b.mean);
    });
  };

  if (!(bandwidth > 0)) {
    std::vector<Cluster<Scalar>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {points[i], {i}, Scalar(0)};
    order(out);
    return out;
  }

  const Scalar stop = static_cast<Scalar>(params.tolerance) * bandwidth;
  std::vector<Vec2<Scalar>> modes(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2<Scalar> x = points[i];
    for (int it = 0; it < params.max_iterations; ++it) {
      Vec2<Scalar> sum = Vec2<Scalar>::Zero();
      std::size_t count = 0;
      for (const auto& p : points) {
        if ((p - x).norm() <= bandwidth) {
          sum += p;
          ++count;
        }
      }
      if (count == 0) break;
      const Vec2<Scalar> next = sum / static_cast<Scalar>(count);
      const Scalar moved = (next - x).norm();
      x = next;
      if (moved < stop) break;
    }
    modes[i] = x;
  }

  // Merge: strongest modes first.
  std::vector<std::size_t> support(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& p : points)
      if ((p - modes[i]).norm() <= bandwidth) ++support[i];
  std::vector<std::size_t> candidates(n);
  std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (support[a] != support[b]) return support[a] > support[b];
    return detail::lex_less(modes[a], modes[b]);
  });
  std::vector<Vec2<Scalar>> kept;
  for (std::size_t c : candidates) {
    bool near = false;
    for (const auto& k : kept)
      if ((k - modes[c]).norm() < bandwidth / 2) {
        near = true;
        break;
      }
    if (!near) kept.push_back(modes[c]);
  }

  std::vector<Cluster<Scalar>> clusters(kept.size());
  std::vector<Vec2<Scalar>> mode_sum(kept.size(), Vec2<Scalar>::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    Scalar best_d = std::numeric_limits<Scalar>::infinity();
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const Scalar d = (points[i] - kept[k]).norm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    clusters[best].members.push_back(i);
    mode_sum[best] += modes[i];
  }
  std::vector<Cluster<Scalar>> out;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (clusters[k].members.empty()) continue;
    clusters[k].mean = mode_sum[k] / static_cast<Scalar>(clusters[k].members.size());
    out.push_back(std::move(clusters[k]));
  }
  order(out);
  return out;
}

template <typename Scalar>
void annotate_distances(std::vector<Cluster<Scalar>>& clusters, const Vec2<Scalar>& robot)
{
  for (auto& c : clusters) c.mean_distance = (c.mean - robot).norm();
}

/// Smallest distance from the robot position to a cluster mean.
template <typename Scalar>
Scalar nearest_cluster_distance(const std::vector<Cluster<Scalar>>& clusters, const Pose2D& robot)
{
  if (clusters.empty()) throw NoClustersError("nearest_cluster_distance: no clusters");
  const Vec2<Scalar> r(static_cast<Scalar>(robot.x), static_cast<Scalar>(robot.y));
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (const auto& c : clusters) best = std::min(best, (c.mean - r).norm());
  return best;
}

}  // namespace socnav

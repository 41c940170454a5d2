#pragma once

// Naive flat-kernel mean shift: all seeds advance in lock step until every
// one has settled, then modes are merged strongest first. Plain std::array
// arithmetic, no Eigen.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace oracle {

using P2 = std::array<double, 2>;

struct OracleCluster
{
  P2 mean{};
  std::size_t size = 0;
};

inline double dist(const P2& a, const P2& b)
{
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

inline std::vector<OracleCluster> naive_mean_shift(const std::vector<P2>& pts, double bw, int max_iter = 300,
                                                   double tol = 1e-4)
{
  const std::size_t n = pts.size();
  std::vector<P2> x = pts;
  std::vector<bool> done(n, false);
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      P2 s{0, 0};
      int cnt = 0;
      for (const P2& p : pts)
        if (dist(p, x[i]) <= bw) {
          s[0] += p[0];
          s[1] += p[1];
          ++cnt;
        }
      if (cnt == 0) {
        done[i] = true;
        continue;
      }
      const P2 nx{s[0] / cnt, s[1] / cnt};
      if (dist(nx, x[i]) < tol * bw) done[i] = true;
      else all = false;
      x[i] = nx;
    }
    if (all) break;
  }

  std::vector<std::size_t> support(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (const P2& p : pts) support[i] += dist(p, x[i]) <= bw;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (support[a] != support[b]) return support[a] > support[b];
    return x[a] < x[b];
  });
  std::vector<P2> modes;
  for (std::size_t i : idx) {
    bool close = false;
    for (const P2& m : modes) close = close || dist(m, x[i]) < bw / 2;
    if (!close) modes.push_back(x[i]);
  }

  std::vector<OracleCluster> out(modes.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 0;
    for (std::size_t j = 1; j < modes.size(); ++j)
      if (dist(pts[i], modes[j]) < dist(pts[i], modes[k])) k = j;
    out[k].mean[0] += x[i][0];
    out[k].mean[1] += x[i][1];
    ++out[k].size;
  }
  std::erase_if(out, [](const OracleCluster& c) { return c.size == 0; });
  for (auto& c : out) {
    c.mean[0] /= static_cast<double>(c.size);
    c.mean[1] /= static_cast<double>(c.size);
  }
  std::stable_sort(out.begin(), out.end(), [](const OracleCluster& a, const OracleCluster& b) {
    if (a.size != b.size) return a.size > b.size;
    return a.mean < b.mean;
  });
  return out;
}

}  // namespace oracle

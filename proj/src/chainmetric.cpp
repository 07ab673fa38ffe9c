#include "gasketlab/chainmetric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

#include "gasketlab/rng.hpp"

namespace gasketlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> bfs_row(const std::vector<std::vector<int>>& adj, double edge_length,
                            int src) {
  const std::size_t n = adj.size();
  std::vector<int> hops(n, -1);
  std::deque<int> q;
  hops[static_cast<std::size_t>(src)] = 0;
  q.push_back(src);
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (hops[static_cast<std::size_t>(v)] == -1) {
        hops[static_cast<std::size_t>(v)] = hops[static_cast<std::size_t>(u)] + 1;
        q.push_back(v);
      }
    }
  }
  std::vector<double> out(n, kInf);
  for (std::size_t i = 0; i < n; ++i)
    if (hops[i] >= 0) out[i] = edge_length * hops[i];
  return out;
}

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

} // namespace

double FiniteMetricSpace::d(int x, int y) const {
  if (!table.empty())
    return table[static_cast<std::size_t>(x) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(y)];
  if (!coords.empty())
    return euclid(coords[static_cast<std::size_t>(x)], coords[static_cast<std::size_t>(y)]);
  return bfs_row(adjacency, edge_length, x)[static_cast<std::size_t>(y)];
}

std::vector<double> FiniteMetricSpace::row(int x) const {
  if (!table.empty()) {
    const auto base = static_cast<std::size_t>(x) * static_cast<std::size_t>(n);
    return std::vector<double>(table.begin() + static_cast<std::ptrdiff_t>(base),
                               table.begin() + static_cast<std::ptrdiff_t>(base + static_cast<std::size_t>(n)));
  }
  if (!coords.empty()) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int y = 0; y < n; ++y)
      out[static_cast<std::size_t>(y)] =
          euclid(coords[static_cast<std::size_t>(x)], coords[static_cast<std::size_t>(y)]);
    return out;
  }
  return bfs_row(adjacency, edge_length, x);
}

std::vector<int> FiniteMetricSpace::ball(int x, double r) const {
  const std::vector<double> dist = row(x);
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (dist[static_cast<std::size_t>(v)] < r) out.push_back(v);
  return out;
}

double FiniteMetricSpace::ball_mass(int x, double r) const {
  const std::vector<double> dist = row(x);
  double s = 0.0;
  for (int v = 0; v < n; ++v)
    if (dist[static_cast<std::size_t>(v)] < r) s += measure.mass[static_cast<std::size_t>(v)];
  return s;
}

double FiniteMetricSpace::diameter() const {
  double best = 0.0;
  if (n <= kTableLimit) {
    for (int x = 0; x < n; ++x) {
      const std::vector<double> dist = row(x);
      for (double v : dist)
        if (std::isfinite(v)) best = std::max(best, v);
    }
    return best;
  }
  SplitMix64 rng = stream_rng(0xD1A8EEull, 0);
  for (int s = 0; s < 64; ++s) {
    const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const std::vector<double> dist = row(x);
    for (double v : dist)
      if (std::isfinite(v)) best = std::max(best, v);
  }
  return best;
}

FiniteMetricSpace FiniteMetricSpace::from_graph(const GasketGraph& g, VertexMeasure m) {
  if (static_cast<int>(m.mass.size()) != g.vertex_count())
    throw std::invalid_argument("from_graph: measure size mismatch");
  FiniteMetricSpace s;
  s.n = g.vertex_count();
  s.measure = std::move(m);
  s.adjacency = g.adjacency;
  s.edge_length = g.edge_length;
  if (s.n <= kTableLimit) {
    s.table.resize(static_cast<std::size_t>(s.n) * static_cast<std::size_t>(s.n));
    for (int x = 0; x < s.n; ++x) {
      const std::vector<double> dist = bfs_row(s.adjacency, s.edge_length, x);
      std::copy(dist.begin(), dist.end(),
                s.table.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(x) *
                                                              static_cast<std::size_t>(s.n)));
    }
  }
  return s;
}

FiniteMetricSpace FiniteMetricSpace::from_points(std::vector<std::vector<double>> pts,
                                                 VertexMeasure m) {
  if (pts.size() != m.mass.size())
    throw std::invalid_argument("from_points: measure size mismatch");
  FiniteMetricSpace s;
  s.n = static_cast<int>(pts.size());
  s.measure = std::move(m);
  s.coords = std::move(pts);
  return s;
}

std::vector<double> chain_metric_from(const FiniteMetricSpace& s, double eps, int x) {
  if (!(eps > 0.0)) throw std::invalid_argument("chain_metric: eps must be positive");
  std::vector<double> dist(static_cast<std::size_t>(s.n), kInf);
  std::vector<bool> done(static_cast<std::size_t>(s.n), false);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(x)] = 0.0;
  pq.emplace(0.0, x);
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = true;
    const std::vector<double> hop = s.row(u);
    for (int v = 0; v < s.n; ++v) {
      const double h = hop[static_cast<std::size_t>(v)];
      if (v == u || !(h < eps)) continue;
      if (du + h < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = du + h;
        pq.emplace(du + h, v);
      }
    }
  }
  return dist;
}

double chain_metric(const FiniteMetricSpace& s, double eps, int x, int y) {
  return chain_metric_from(s, eps, x)[static_cast<std::size_t>(y)];
}

std::vector<int> chain_path(const FiniteMetricSpace& s, double eps, int x, int y) {
  if (!(eps > 0.0)) throw std::invalid_argument("chain_path: eps must be positive");
  std::vector<double> dist(static_cast<std::size_t>(s.n), kInf);
  std::vector<int> pred(static_cast<std::size_t>(s.n), -1);
  std::vector<bool> done(static_cast<std::size_t>(s.n), false);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(x)] = 0.0;
  pq.emplace(0.0, x);
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = true;
    if (u == y) break;
    const std::vector<double> hop = s.row(u);
    for (int v = 0; v < s.n; ++v) {
      const double h = hop[static_cast<std::size_t>(v)];
      if (v == u || !(h < eps)) continue;
      if (du + h < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = du + h;
        pred[static_cast<std::size_t>(v)] = u;
        pq.emplace(du + h, v);
      }
    }
  }
  if (!std::isfinite(dist[static_cast<std::size_t>(y)]))
    throw std::runtime_error("chain_path: no finite chain");
  std::vector<int> path;
  for (int v = y; v != -1; v = pred[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

int chain_midpoint(const FiniteMetricSpace& s, double eps, int x, int y) {
  if (x == y) return x;
  const std::vector<int> path = chain_path(s, eps, x, y);
  double total = 0.0;
  std::vector<double> hops(path.size() - 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    hops[i] = s.d(path[i], path[i + 1]);
    total += hops[i];
  }
  // first index whose prefix sum reaches half the chain length
  double prefix = 0.0;
  for (std::size_t k = 0; k < hops.size(); ++k) {
    prefix += hops[k];
    if (prefix >= 0.5 * total) return path[k + 1];
  }
  return path.back();
}

double chain_constant(const FiniteMetricSpace& s, const std::vector<double>& eps_list,
                      std::uint64_t seed) {
  if (eps_list.empty()) throw std::invalid_argument("chain_constant: empty eps list");
  std::vector<std::pair<int, int>> pairs;
  if (s.n <= FiniteMetricSpace::kTableLimit) {
    for (int x = 0; x < s.n; ++x)
      for (int y = x + 1; y < s.n; ++y) pairs.emplace_back(x, y);
  } else {
    pairs.reserve(100000);
    for (std::uint64_t i = 0; i < 100000; ++i) {
      SplitMix64 rng = stream_rng(seed, i);
      const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n)));
      const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n)));
      if (x != y) pairs.emplace_back(std::min(x, y), std::max(x, y));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  double worst = 0.0;
  for (double eps : eps_list) {
    int last_src = -1;
    std::vector<double> deps, base;
    for (const auto& [x, y] : pairs) {
      if (x != last_src) {
        deps = chain_metric_from(s, eps, x);
        base = s.row(x);
        last_src = x;
      }
      const double d0 = base[static_cast<std::size_t>(y)];
      if (!(d0 > 0.0)) continue;
      worst = std::max(worst, deps[static_cast<std::size_t>(y)] / d0);
    }
  }
  return worst;
}

std::vector<int> epsilon_net(const FiniteMetricSpace& s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon_net: eps must be positive");
  std::vector<int> net;
  std::vector<double> mind(static_cast<std::size_t>(s.n), kInf);
  for (int v = 0; v < s.n; ++v) {
    if (mind[static_cast<std::size_t>(v)] >= eps) {
      net.push_back(v);
      const std::vector<double> dist = s.row(v);
      for (int u = 0; u < s.n; ++u)
        mind[static_cast<std::size_t>(u)] =
            std::min(mind[static_cast<std::size_t>(u)], dist[static_cast<std::size_t>(u)]);
    }
  }
  return net;
}

} // namespace gasketlab

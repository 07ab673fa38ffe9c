// chainmetric.hpp -- finite metric spaces, epsilon-chain metrics, chain
// constants, greedy nets, and the constructive chain midpoint.
#pragma once

#include <cstdint>
#include <vector>

#include "gasketlab/geometry.hpp"
#include "gasketlab/measures.hpp"

namespace gasketlab {

// Point set {0..n-1} with a metric and a point measure. Three backends:
// a cached all-pairs table (small spaces), straight-line distances from
// embedding coordinates, or on-demand BFS over a stored adjacency.
struct FiniteMetricSpace {
  int n = 0;
  VertexMeasure measure;

  std::vector<double> table;                 // row-major n*n when cached
  std::vector<std::vector<double>> coords;   // straight-line backend
  std::vector<std::vector<int>> adjacency;   // graph backend
  double edge_length = 0.0;

  static constexpr int kTableLimit = 2000;

  double d(int x, int y) const;
  std::vector<double> row(int x) const;      // distances from x to all points
  std::vector<int> ball(int x, double r) const;   // strict: d(x,v) < r
  double ball_mass(int x, double r) const;
  double diameter() const;

  // graph metric with the graph's vertex measure semantics left to caller
  static FiniteMetricSpace from_graph(const GasketGraph& g, VertexMeasure m);
  // straight-line metric on embedded points
  static FiniteMetricSpace from_points(std::vector<std::vector<double>> pts, VertexMeasure m);
};

// d_eps(x, .): shortest path where every hop has d < eps; +inf when no chain
std::vector<double> chain_metric_from(const FiniteMetricSpace& s, double eps, int x);
double chain_metric(const FiniteMetricSpace& s, double eps, int x, int y);

// exact shortest eps-chain x = p_0, ..., p_M = y; throws when none exists
std::vector<int> chain_path(const FiniteMetricSpace& s, double eps, int x, int y);

// first point along the shortest chain whose prefix length reaches half the
// total; satisfies |2 d_eps(x,z) - d_eps(x,y)| <= 5 eps and the same for y
int chain_midpoint(const FiniteMetricSpace& s, double eps, int x, int y);

// max over sampled pairs and the eps list of d_eps(x,y)/d(x,y); all pairs
// when n <= 2000, otherwise 10^5 seeded pairs
double chain_constant(const FiniteMetricSpace& s, const std::vector<double>& eps_list,
                      std::uint64_t seed = 93101);

// greedy maximal eps-separated subset, scanning points in ascending index
std::vector<int> epsilon_net(const FiniteMetricSpace& s, double eps);

} // namespace gasketlab

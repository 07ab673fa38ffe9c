// geometry.hpp -- finite-depth gasket complexes in N dimensions.
//
// A gasket is specified by the simplex dimension N and a sequence of
// subdivision levels (l_1,...,l_n). A depth-n cell is addressed by a word
// w = w_1...w_n where w_k is a multi-index in S_{l_k}. Vertices are
// deduplicated in exact integer barycentric coordinates with common
// denominator L_n = l_1*...*l_n; no floating-point comparison is involved.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gasketlab/wideint.hpp"

namespace gasketlab {

struct GasketSpec {
  int dimension = 2;            // N >= 2
  std::vector<int> levels;      // each l_k >= 2, non-empty

  bool constant_levels() const;
  void validate() const;        // throws std::domain_error on bad input
};

// one subdivision cell index: (i_1,...,i_N) >= 0 with sum <= l-1
using MultiIndex = std::vector<int>;

// all of S_l in lexicographic order; size binomial(l-1+N, N)
std::vector<MultiIndex> enumerate_s(int l, int N);

WideInt s_count(int l, int N);  // #S_l

struct Word {
  std::vector<MultiIndex> parts;   // one entry per depth level
  std::string to_string() const;
};

struct VertexKey {
  std::vector<WideInt> a;          // integer coordinates over denominator L_n

  friend bool operator<(const VertexKey& x, const VertexKey& y) { return x.a < y.a; }
  friend bool operator==(const VertexKey& x, const VertexKey& y) { return x.a == y.a; }
};

struct Cell {
  Word word;
  std::vector<int> v;              // N+1 vertex indices, base corner first
};

struct Edge {
  int u = 0, v = 0;
  int multiplicity = 1;            // number of cells sharing the pair
};

struct GasketGraph {
  GasketSpec spec;
  int depth = 0;
  int N = 2;
  WideInt denominator = 1;         // L_n
  WideInt cell_count = 1;          // M_n
  std::vector<VertexKey> vertices;
  std::map<VertexKey, int> vertex_index;
  std::vector<Cell> cells;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adjacency;   // deduplicated neighbor lists
  std::vector<int> boundary;                 // corner vertices q_0..q_N
  double edge_length = 1.0;                  // 1/L_n

  int vertex_count() const { return static_cast<int>(vertices.size()); }
};

GasketGraph build_graph(const GasketSpec& spec, int depth);

// Shortest-path metric with every edge weighted 1/L_n. Edges all have the
// same length, so distances are exact integer multiples of 1/L_n.
std::vector<double> graph_distances_from(const GasketGraph& g, int src);
double graph_distance(const GasketGraph& g, int u, int v);

// Coordinates of the vertices inside a regular unit-side simplex in R^N,
// for plot export and the straight-line comparison metric.
std::vector<std::vector<double>> embed_vertices(const GasketGraph& g);

} // namespace gasketlab

#include "gasketlab/geometry.hpp"
#include "gasketlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace gasketlab {

bool GasketSpec::constant_levels() const {
  for (int l : levels)
    if (l != levels.front()) return false;
  return !levels.empty();
}

void GasketSpec::validate() const {
  if (dimension < 2) throw std::domain_error("gasket dimension must be >= 2");
  if (levels.empty()) throw std::domain_error("level sequence must be non-empty");
  for (int l : levels)
    if (l < 2) throw std::domain_error("every subdivision level must be >= 2");
}

std::vector<MultiIndex> enumerate_s(int l, int N) {
  if (l < 2) throw std::domain_error("enumerate_s: level must be >= 2");
  if (N < 2) throw std::domain_error("enumerate_s: dimension must be >= 2");
  std::vector<MultiIndex> out;
  MultiIndex cur(N, 0);
  // lexicographic: recurse over coordinates, earlier coordinates vary slowest
  auto rec = [&](auto&& self, int pos, int budget) -> void {
    if (pos == N) {
      out.push_back(cur);
      return;
    }
    for (int i = 0; i <= budget; ++i) {
      cur[pos] = i;
      self(self, pos + 1, budget - i);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, l - 1);
  return out;
}

WideInt s_count(int l, int N) {
  // binomial(l-1+N, N)
  WideInt num = 1, den = 1;
  for (int k = 1; k <= N; ++k) {
    num *= (l - 1 + k);
    den *= k;
  }
  return num / den;
}

std::string Word::to_string() const {
  std::ostringstream os;
  for (size_t k = 0; k < parts.size(); ++k) {
    if (k) os << '.';
    for (size_t j = 0; j < parts[k].size(); ++j) {
      if (j) os << ',';
      os << parts[k][j];
    }
  }
  return os.str();
}

GasketGraph build_graph(const GasketSpec& spec, int depth) {
  spec.validate();
  if (depth < 0 || depth > static_cast<int>(spec.levels.size()))
    throw std::domain_error("build_graph: depth exceeds available levels");

  const int N = spec.dimension;
  GasketGraph g;
  g.spec = spec;
  g.depth = depth;
  g.N = N;
  for (int k = 0; k < depth; ++k) g.denominator *= spec.levels[k];

  // Enumerate words together with the integer base corner of each cell.
  // base(w) = sum_k w_k * (L_n / (l_1...l_k)); a depth-n cell spans one
  // integer unit along each axis.
  struct Partial {
    Word word;
    std::vector<WideInt> base;
  };
  std::vector<Partial> cells{{Word{}, std::vector<WideInt>(N, 0)}};
  WideInt scale = g.denominator;
  for (int k = 0; k < depth; ++k) {
    const int l = spec.levels[k];
    scale /= l;
    const auto S = enumerate_s(l, N);
    std::vector<Partial> next;
    next.reserve(cells.size() * S.size());
    for (const auto& p : cells) {
      for (const auto& idx : S) {
        Partial q = p;
        q.word.parts.push_back(idx);
        for (int j = 0; j < N; ++j) q.base[j] += WideInt(idx[j]) * scale;
        next.push_back(std::move(q));
      }
    }
    cells = std::move(next);
  }
  g.cell_count = static_cast<WideInt>(cells.size());

  auto intern_key = [&](const VertexKey& key) {
    auto [it, inserted] = g.vertex_index.try_emplace(key, g.vertex_count());
    if (inserted) g.vertices.push_back(key);
    return it->second;
  };

  std::map<std::pair<int, int>, int> edge_mult;
  g.cells.reserve(cells.size());
  for (auto& p : cells) {
    Cell cell;
    cell.word = std::move(p.word);
    VertexKey key{p.base};
    cell.v.push_back(intern_key(key));
    for (int j = 0; j < N; ++j) {
      VertexKey corner{p.base};
      corner.a[j] += 1;
      cell.v.push_back(intern_key(corner));
    }
    for (size_t a = 0; a < cell.v.size(); ++a)
      for (size_t b = a + 1; b < cell.v.size(); ++b) {
        auto pr = std::minmax(cell.v[a], cell.v[b]);
        ++edge_mult[{pr.first, pr.second}];
      }
    g.cells.push_back(std::move(cell));
  }

  g.edges.reserve(edge_mult.size());
  g.adjacency.assign(g.vertex_count(), {});
  for (const auto& [pr, mult] : edge_mult) {
    g.edges.push_back(Edge{pr.first, pr.second, mult});
    g.adjacency[pr.first].push_back(pr.second);
    g.adjacency[pr.second].push_back(pr.first);
  }
  for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());

  // corners q_0, q_1, ..., q_N in integer coordinates: 0 and L_n * e_j
  {
    VertexKey origin{std::vector<WideInt>(N, 0)};
    g.boundary.push_back(g.vertex_index.at(origin));
    for (int j = 0; j < N; ++j) {
      VertexKey corner{std::vector<WideInt>(N, 0)};
      corner.a[j] = g.denominator;
      g.boundary.push_back(g.vertex_index.at(corner));
    }
  }

  g.edge_length = 1.0 / to_double(g.denominator);
  return g;
}

std::vector<double> graph_distances_from(const GasketGraph& g, int src) {
  if (src < 0 || src >= g.vertex_count())
    throw std::out_of_range("graph_distances_from: bad vertex index");
  std::vector<int> hops(g.vertex_count(), -1);
  std::deque<int> queue{src};
  hops[src] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : g.adjacency[u])
      if (hops[v] < 0) {
        hops[v] = hops[u] + 1;
        queue.push_back(v);
      }
  }
  std::vector<double> dist(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (hops[v] < 0) throw std::runtime_error("gasket graph is disconnected");
    dist[v] = hops[v] * g.edge_length;
  }
  return dist;
}

double graph_distance(const GasketGraph& g, int u, int v) {
  if (v < 0 || v >= g.vertex_count())
    throw std::out_of_range("graph_distance: bad vertex index");
  return graph_distances_from(g, u)[v];
}

std::vector<std::vector<double>> embed_vertices(const GasketGraph& g) {
  const int N = g.N;
  // regular unit-side simplex corners p_0..p_N in R^N, p_0 at the origin;
  // p_j . p_i = 1/2 for 1 <= i < j pins the coordinates by forward substitution
  std::vector<std::vector<double>> p(N + 1, std::vector<double>(N, 0.0));
  for (int j = 1; j <= N; ++j) {
    double norm2 = 0.0;
    for (int i = 1; i < j; ++i) {
      double dot = 0.0;
      for (int k = 0; k < i - 1; ++k) dot += p[j][k] * p[i][k];
      p[j][i - 1] = (0.5 - dot) / p[i][i - 1];
      norm2 += p[j][i - 1] * p[j][i - 1];
    }
    p[j][j - 1] = std::sqrt(1.0 - norm2);
  }

  const double L = to_double(g.denominator);
  std::vector<std::vector<double>> coords(g.vertex_count(), std::vector<double>(N, 0.0));
  for (int v = 0; v < g.vertex_count(); ++v)
    for (int j = 0; j < N; ++j) {
      const double w = to_double(g.vertices[v].a[j]) / L;
      for (int k = 0; k < N; ++k) coords[v][k] += w * p[j + 1][k];
    }
  return coords;
}

double CellMeasure::total() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

CellMeasure uniform_cell_measure(const GasketGraph& g) {
  CellMeasure cm;
  cm.depth = g.depth;
  cm.mass.assign(g.cells.size(), 1.0 / to_double(g.cell_count));
  return cm;
}

double VertexMeasure::total() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

VertexMeasure vertex_measure_from_cells(const GasketGraph& g, const CellMeasure& cm) {
  if (cm.mass.size() != g.cells.size())
    throw std::invalid_argument("vertex_measure_from_cells: cell count mismatch");
  VertexMeasure vm;
  vm.mass.assign(g.vertex_count(), 0.0);
  const double share = 1.0 / (g.N + 1);
  for (size_t c = 0; c < g.cells.size(); ++c)
    for (int v : g.cells[c].v) vm.mass[v] += cm.mass[c] * share;
  return vm;
}

} // namespace gasketlab

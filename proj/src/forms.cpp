#include "gasketlab/forms.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <map>
#include <stdexcept>
#include <utility>

namespace gasketlab {

double QuadraticForm::energy(const Vector& f) const {
  return f.dot(A * f);
}

double QuadraticForm::energy(const Vector& f, const Vector& g) const {
  return f.dot(A * g);
}

double QuadraticForm::conductance(int u, int v) const {
  if (u == v) return 0.0;
  return -A.coeff(u, v);
}

std::vector<double> QuadraticForm::vertex_conductance() const {
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = A.coeff(i, i);
  return c;
}

QuadraticForm base_form(int N) {
  if (N < 1) throw std::invalid_argument("base_form: dimension must be positive");
  QuadraticForm q;
  q.n = N + 1;
  Eigen::MatrixXd dense = -Eigen::MatrixXd::Ones(N + 1, N + 1);
  dense.diagonal().array() = static_cast<double>(N);
  q.A = dense.sparseView();
  return q;
}

// ---------------------------------------------------------------------------
// exact rational network reduction
// ---------------------------------------------------------------------------

namespace {

using RMatrix = std::vector<std::vector<Rational>>;

// graph Laplacian of the unscaled depth-1 sum form: every cell contributes
// the base form on its own vertices with unit weight
RMatrix unit_level_matrix(const GasketGraph& g) {
  const std::size_t n = static_cast<std::size_t>(g.vertex_count());
  RMatrix a(n, std::vector<Rational>(n, Rational(0)));
  for (const Cell& c : g.cells) {
    for (std::size_t j = 0; j < c.v.size(); ++j) {
      for (std::size_t k = j + 1; k < c.v.size(); ++k) {
        const auto u = static_cast<std::size_t>(c.v[j]);
        const auto v = static_cast<std::size_t>(c.v[k]);
        a[u][v] -= 1;
        a[v][u] -= 1;
        a[u][u] += 1;
        a[v][v] += 1;
      }
    }
  }
  return a;
}

// symmetric elimination of one index from the active set
void eliminate_index(RMatrix& a, std::vector<int>& active, int pivot) {
  const auto p = static_cast<std::size_t>(pivot);
  if (a[p][p] == 0) throw std::runtime_error("network reduction: zero pivot");
  std::vector<int> rest;
  rest.reserve(active.size());
  for (int i : active)
    if (i != pivot) rest.push_back(i);
  for (int i : rest) {
    const auto ii = static_cast<std::size_t>(i);
    if (a[ii][p] == 0) continue;
    const Rational factor = a[ii][p] / a[p][p];
    for (int j : rest) {
      const auto jj = static_cast<std::size_t>(j);
      a[ii][jj] -= factor * a[p][jj];
    }
  }
  active = std::move(rest);
}

} // namespace

Rational resistance_scale(int N, int l) {
  static std::map<std::pair<int, int>, Rational> cache;
  const auto key = std::make_pair(N, l);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  GasketSpec spec;
  spec.dimension = N;
  spec.levels = {l};
  const GasketGraph g = build_graph(spec, 1);

  RMatrix a = unit_level_matrix(g);
  std::vector<int> active(static_cast<std::size_t>(g.vertex_count()));
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);
  std::vector<bool> is_corner(active.size(), false);
  for (int b : g.boundary) is_corner[static_cast<std::size_t>(b)] = true;
  for (int i = 0; i < g.vertex_count(); ++i)
    if (!is_corner[static_cast<std::size_t>(i)]) eliminate_index(a, active, i);

  // remaining block must be an exact multiple of the base form
  const auto c0 = static_cast<std::size_t>(g.boundary[0]);
  const Rational r = a[c0][c0] / N;
  for (int bi : g.boundary) {
    for (int bj : g.boundary) {
      const auto i = static_cast<std::size_t>(bi);
      const auto j = static_cast<std::size_t>(bj);
      const Rational want = (bi == bj) ? Rational(N) * r : -r;
      if (a[i][j] != want)
        throw std::runtime_error("resistance_scale: trace not proportional to base form");
    }
  }
  if (!(r > 0 && r < 1))
    throw std::runtime_error("resistance_scale: factor outside (0,1)");
  cache.emplace(key, r);
  return r;
}

ScaledFormParams ScaledFormParams::make(const GasketSpec& spec) {
  spec.validate();
  ScaledFormParams p;
  p.spec = spec;
  p.R.assign(1, Rational(1));
  p.M.assign(1, WideInt(1));
  p.T.assign(1, Rational(1));
  for (int l : spec.levels) {
    const Rational r = resistance_scale(spec.dimension, l);
    p.r_level.push_back(r);
    p.R.push_back(p.R.back() * r);
    p.M.push_back(p.M.back() * s_count(l, spec.dimension));
    p.T.push_back(Rational(p.M.back()) / p.R.back());
  }
  return p;
}

QuadraticForm assemble_form(const GasketGraph& g, const ScaledFormParams& params) {
  if (g.depth >= static_cast<int>(params.R.size()))
    throw std::invalid_argument("assemble_form: params too shallow for graph depth");
  const double inv_r = to_double(Rational(1) / params.R[static_cast<std::size_t>(g.depth)]);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.cells.size() * 12);
  for (const Cell& c : g.cells) {
    for (std::size_t j = 0; j < c.v.size(); ++j) {
      for (std::size_t k = j + 1; k < c.v.size(); ++k) {
        trip.emplace_back(c.v[j], c.v[k], -inv_r);
        trip.emplace_back(c.v[k], c.v[j], -inv_r);
        trip.emplace_back(c.v[j], c.v[j], inv_r);
        trip.emplace_back(c.v[k], c.v[k], inv_r);
      }
    }
  }
  QuadraticForm q;
  q.n = g.vertex_count();
  q.A.resize(q.n, q.n);
  q.A.setFromTriplets(trip.begin(), trip.end());
  return q;
}

QuadraticForm trace_form(const QuadraticForm& form, const std::vector<int>& boundary) {
  const int n = form.n;
  if (boundary.empty()) throw std::invalid_argument("trace_form: empty boundary");
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    const int v = boundary[b];
    if (v < 0 || v >= n) throw std::out_of_range("trace_form: boundary index");
    if (pos[static_cast<std::size_t>(v)] != -1)
      throw std::invalid_argument("trace_form: repeated boundary index");
    pos[static_cast<std::size_t>(v)] = static_cast<int>(b);
  }
  std::vector<int> interior;
  for (int v = 0; v < n; ++v)
    if (pos[static_cast<std::size_t>(v)] == -1) interior.push_back(v);
  const int ni = static_cast<int>(interior.size());
  const int nb = static_cast<int>(boundary.size());

  Eigen::MatrixXd s(nb, nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) s(i, j) = form.A.coeff(boundary[static_cast<std::size_t>(i)],
                                                        boundary[static_cast<std::size_t>(j)]);
  if (ni > 0) {
    std::vector<int> ipos(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < ni; ++i) ipos[static_cast<std::size_t>(interior[static_cast<std::size_t>(i)])] = i;
    std::vector<Eigen::Triplet<double>> tii;
    Eigen::MatrixXd aib = Eigen::MatrixXd::Zero(ni, nb);
    for (int col = 0; col < form.A.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(form.A, col); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int c = static_cast<int>(it.col());
        const int ri = ipos[static_cast<std::size_t>(r)];
        const int ci = ipos[static_cast<std::size_t>(c)];
        if (ri != -1 && ci != -1)
          tii.emplace_back(ri, ci, it.value());
        else if (ri != -1 && ci == -1)
          aib(ri, pos[static_cast<std::size_t>(c)]) += it.value();
      }
    }
    Eigen::SparseMatrix<double> aii(ni, ni);
    aii.setFromTriplets(tii.begin(), tii.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(aii);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("trace_form: interior block not factorizable");
    const Eigen::MatrixXd x = ldlt.solve(aib);
    s.noalias() -= aib.transpose() * x;
  }
  QuadraticForm out;
  out.n = nb;
  out.A = s.sparseView();
  return out;
}

Vector dirichlet_solve(const QuadraticForm& form, const std::vector<int>& boundary,
                       const std::vector<double>& values) {
  const int n = form.n;
  if (boundary.empty()) throw std::invalid_argument("dirichlet_solve: empty boundary");
  if (boundary.size() != values.size())
    throw std::invalid_argument("dirichlet_solve: boundary/value size mismatch");
  std::vector<int> bpos(static_cast<std::size_t>(n), -1);
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    const int v = boundary[b];
    if (v < 0 || v >= n) throw std::out_of_range("dirichlet_solve: boundary index");
    if (bpos[static_cast<std::size_t>(v)] != -1)
      throw std::invalid_argument("dirichlet_solve: repeated boundary index");
    bpos[static_cast<std::size_t>(v)] = static_cast<int>(b);
  }
  std::vector<int> interior;
  std::vector<int> ipos(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    if (bpos[static_cast<std::size_t>(v)] == -1) {
      ipos[static_cast<std::size_t>(v)] = static_cast<int>(interior.size());
      interior.push_back(v);
    }
  }
  Vector out(n);
  for (std::size_t b = 0; b < boundary.size(); ++b) out[boundary[b]] = values[b];
  const int ni = static_cast<int>(interior.size());
  if (ni == 0) return out;

  std::vector<Eigen::Triplet<double>> tii;
  Vector rhs = Vector::Zero(ni);
  for (int col = 0; col < form.A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(form.A, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      const int ri = ipos[static_cast<std::size_t>(r)];
      if (ri == -1) continue;
      const int ci = ipos[static_cast<std::size_t>(c)];
      if (ci != -1)
        tii.emplace_back(ri, ci, it.value());
      else
        rhs[ri] -= it.value() * values[static_cast<std::size_t>(bpos[static_cast<std::size_t>(c)])];
    }
  }
  Eigen::SparseMatrix<double> aii(ni, ni);
  aii.setFromTriplets(tii.begin(), tii.end());

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(20LL * ni + 200);
  cg.compute(aii);
  Vector x = cg.solve(rhs);
  if (cg.info() != Eigen::Success || !x.allFinite()) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(aii);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("dirichlet_solve: interior block not factorizable");
    x = ldlt.solve(rhs);
  }
  for (int i = 0; i < ni; ++i) out[interior[static_cast<std::size_t>(i)]] = x[i];
  return out;
}

// ---------------------------------------------------------------------------
// harmonic extension templates
// ---------------------------------------------------------------------------

namespace {

struct ExtTemplate {
  std::vector<std::vector<WideInt>> coords;  // all level-l vertex keys, denominator l
  Eigen::MatrixXd weights;                   // vertex count x (N+1), corner rows are unit rows
};

// exact harmonic extension matrix for the single-level network: rational
// Gaussian elimination of [A_II | -A_IB], one RHS column per corner
ExtTemplate make_template(int N, int l) {
  GasketSpec spec;
  spec.dimension = N;
  spec.levels = {l};
  const GasketGraph g = build_graph(spec, 1);
  const int n = g.vertex_count();
  const int nb = N + 1;

  std::vector<int> bpos(static_cast<std::size_t>(n), -1);
  for (int b = 0; b < nb; ++b)
    bpos[static_cast<std::size_t>(g.boundary[static_cast<std::size_t>(b)])] = b;
  std::vector<int> interior;
  std::vector<int> ipos(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    if (bpos[static_cast<std::size_t>(v)] == -1) {
      ipos[static_cast<std::size_t>(v)] = static_cast<int>(interior.size());
      interior.push_back(v);
    }
  }
  const int ni = static_cast<int>(interior.size());
  const RMatrix a = unit_level_matrix(g);

  RMatrix aug(static_cast<std::size_t>(ni),
              std::vector<Rational>(static_cast<std::size_t>(ni + nb), Rational(0)));
  for (int i = 0; i < ni; ++i) {
    const auto gi = static_cast<std::size_t>(interior[static_cast<std::size_t>(i)]);
    for (int j = 0; j < ni; ++j)
      aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          a[gi][static_cast<std::size_t>(interior[static_cast<std::size_t>(j)])];
    for (int b = 0; b < nb; ++b)
      aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(ni + b)] =
          -a[gi][static_cast<std::size_t>(g.boundary[static_cast<std::size_t>(b)])];
  }
  // forward elimination with nonzero pivot search
  for (int col = 0; col < ni; ++col) {
    int piv = -1;
    for (int row = col; row < ni; ++row) {
      if (aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] != 0) {
        piv = row;
        break;
      }
    }
    if (piv == -1) throw std::runtime_error("harmonic extension: singular interior block");
    std::swap(aug[static_cast<std::size_t>(col)], aug[static_cast<std::size_t>(piv)]);
    const Rational pval = aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    for (int row = 0; row < ni; ++row) {
      if (row == col) continue;
      const Rational f = aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] / pval;
      if (f == 0) continue;
      for (int j = col; j < ni + nb; ++j)
        aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)] -=
            f * aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
    }
  }

  ExtTemplate t;
  t.coords.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) t.coords[static_cast<std::size_t>(v)] = g.vertices[static_cast<std::size_t>(v)].a;
  t.weights = Eigen::MatrixXd::Zero(n, nb);
  for (int b = 0; b < nb; ++b)
    t.weights(g.boundary[static_cast<std::size_t>(b)], b) = 1.0;
  for (int i = 0; i < ni; ++i) {
    const Rational pval = aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    for (int b = 0; b < nb; ++b) {
      const Rational w = aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(ni + b)] / pval;
      t.weights(interior[static_cast<std::size_t>(i)], b) = to_double(w);
    }
  }
  return t;
}

const ExtTemplate& extension_template(int N, int l) {
  static std::map<std::pair<int, int>, ExtTemplate> cache;
  const auto key = std::make_pair(N, l);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_template(N, l)).first;
  return it->second;
}

} // namespace

Vector harmonic_extend(const GasketGraph& prev, const GasketGraph& next, const Vector& f) {
  if (prev.spec.dimension != next.spec.dimension || next.depth != prev.depth + 1)
    throw std::invalid_argument("harmonic_extend: graphs are not successive refinements");
  for (int k = 0; k < prev.depth; ++k) {
    if (prev.spec.levels[static_cast<std::size_t>(k)] != next.spec.levels[static_cast<std::size_t>(k)])
      throw std::invalid_argument("harmonic_extend: level schedules disagree");
  }
  if (f.size() != prev.vertex_count())
    throw std::invalid_argument("harmonic_extend: value vector size mismatch");
  const int N = prev.spec.dimension;
  const int l = next.spec.levels[static_cast<std::size_t>(prev.depth)];
  const ExtTemplate& t = extension_template(N, l);

  Vector out = Vector::Zero(next.vertex_count());
  std::vector<WideInt> key(static_cast<std::size_t>(N));
  for (const Cell& c : prev.cells) {
    const std::vector<WideInt>& base = prev.vertices[static_cast<std::size_t>(c.v[0])].a;
    Eigen::VectorXd corner(N + 1);
    for (int j = 0; j <= N; ++j) corner[j] = f[c.v[static_cast<std::size_t>(j)]];
    for (std::size_t tv = 0; tv < t.coords.size(); ++tv) {
      for (int d = 0; d < N; ++d)
        key[static_cast<std::size_t>(d)] = base[static_cast<std::size_t>(d)] * l +
                                           t.coords[tv][static_cast<std::size_t>(d)];
      const auto it = next.vertex_index.find(VertexKey{key});
      if (it == next.vertex_index.end())
        throw std::runtime_error("harmonic_extend: refined vertex missing");
      out[it->second] = t.weights.row(static_cast<Eigen::Index>(tv)).dot(corner);
    }
  }
  return out;
}

CellMeasure cell_energy_measure(const GasketGraph& g, const ScaledFormParams& params,
                                const Vector& f) {
  if (g.depth >= static_cast<int>(params.R.size()))
    throw std::invalid_argument("cell_energy_measure: params too shallow");
  if (f.size() != g.vertex_count())
    throw std::invalid_argument("cell_energy_measure: value vector size mismatch");
  const double inv_r = to_double(Rational(1) / params.R[static_cast<std::size_t>(g.depth)]);
  CellMeasure m;
  m.depth = g.depth;
  m.mass.resize(g.cells.size());
  for (std::size_t w = 0; w < g.cells.size(); ++w) {
    const Cell& c = g.cells[w];
    double e = 0.0;
    for (std::size_t j = 0; j < c.v.size(); ++j) {
      for (std::size_t k = j + 1; k < c.v.size(); ++k) {
        const double d = f[c.v[j]] - f[c.v[k]];
        e += d * d;
      }
    }
    m.mass[w] = inv_r * e;
  }
  return m;
}

VertexMeasure vertex_energy_measure(const QuadraticForm& form, const Vector& f) {
  if (f.size() != form.n)
    throw std::invalid_argument("vertex_energy_measure: value vector size mismatch");
  VertexMeasure m;
  m.mass.assign(static_cast<std::size_t>(form.n), 0.0);
  for (int col = 0; col < form.A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(form.A, col); it; ++it) {
      if (it.row() == it.col()) continue;
      const double c = -it.value();
      const double d = f[it.row()] - f[it.col()];
      m.mass[static_cast<std::size_t>(it.row())] += 0.5 * c * d * d;
    }
  }
  return m;
}

} // namespace gasketlab

// Unit tests: base forms, exact resistance factors, traces, harmonic
// extension, and energy measures.
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gasketlab/forms.hpp"
#include "gasketlab/rng.hpp"
#include "test_support.hpp"

using namespace gasketlab;
using testlab::make_sg2;
using testlab::sg2_spec;

namespace {

int vertex_at(const GasketGraph& g, std::vector<int> coords) {
  VertexKey key;
  for (int c : coords) key.a.push_back(WideInt(c));
  return g.vertex_index.at(key);
}

Vector random_vector(int n, std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 rng = stream_rng(seed, stream);
  Vector f(n);
  for (int i = 0; i < n; ++i) f[i] = rng.uniform();
  return f;
}

double trace_residual_vs_base(const QuadraticForm& traced, int N) {
  const QuadraticForm base = base_form(N);
  double worst = 0.0;
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j)
      worst = std::max(worst, std::abs(traced.A.coeff(i, j) - base.A.coeff(i, j)));
  return worst;
}

} // namespace

TEST_SUITE("forms") {

TEST_CASE("base form is the simplex energy") {
  const QuadraticForm base = base_form(2);
  Vector f(3);
  f << 1.0, 0.0, 0.0;
  CHECK(base.energy(f) == doctest::Approx(2.0).epsilon(1e-15));
  // zero row sums: constants cost nothing
  Vector shifted = f.array() + 7.5;
  CHECK(base.energy(shifted) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(base.conductance(0, 1) == doctest::Approx(1.0));
  for (double c : base.vertex_conductance()) CHECK(c == doctest::Approx(2.0));
}

TEST_CASE("resistance factors match the exact rational table") {
  struct Row { int N; int l; long long num; long long den; };
  const Row table[] = {
      {2, 2, 3, 5},      {2, 3, 7, 15},       {2, 4, 41, 103},
      {2, 5, 591, 1663}, {2, 6, 7025, 21559},
      {3, 2, 2, 3},      {3, 3, 9, 16},       {3, 4, 452, 883},
  };
  for (const Row& row : table) {
    const Rational r = resistance_scale(row.N, row.l);
    CHECK(r == Rational(row.num, row.den));
  }
}

TEST_CASE("scaled parameters carry exact renormalization data") {
  const ScaledFormParams p2 = ScaledFormParams::make(sg2_spec(3));
  CHECK(p2.R[0] == Rational(1));
  CHECK(p2.R[1] == Rational(3, 5));
  CHECK(p2.R[2] == Rational(9, 25));
  CHECK(p2.M[3] == 27);
  CHECK(p2.T[1] == Rational(5));
  CHECK(p2.T[2] == Rational(25));
  CHECK(p2.T_at(3) == doctest::Approx(125.0).epsilon(1e-15));

  GasketSpec mixed;
  mixed.dimension = 2;
  mixed.levels = {2, 3};
  const ScaledFormParams pm = ScaledFormParams::make(mixed);
  CHECK(pm.r_level[0] == Rational(3, 5));
  CHECK(pm.r_level[1] == Rational(7, 15));
  CHECK(pm.M[2] == 18);
  CHECK(pm.T[2] == Rational(450, 7));
}

TEST_CASE("trace of the scaled form reproduces the base form") {
  for (int depth = 1; depth <= 2; ++depth) {
    const auto lab = make_sg2(depth);
    const QuadraticForm traced = trace_form(lab.form, lab.g.boundary);
    CHECK(trace_residual_vs_base(traced, 2) < 1e-10);
  }
}

TEST_CASE("two-point trace gives the corner-to-corner conductance") {
  const QuadraticForm base = base_form(2);
  const QuadraticForm traced = trace_form(base, {0, 1});
  // eliminating the third corner of a unit triangle leaves conductance 3/2
  CHECK(traced.conductance(0, 1) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("harmonic midpoint rule and maximum principle") {
  const auto lab = make_sg2(1);
  CHECK(lab.h[static_cast<std::size_t>(vertex_at(lab.g, {1, 0}))] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(lab.h[static_cast<std::size_t>(vertex_at(lab.g, {0, 1}))] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(lab.h[static_cast<std::size_t>(vertex_at(lab.g, {1, 1}))] == doctest::Approx(0.2).epsilon(1e-12));

  const auto deep = make_sg2(4);
  const Vector residual = deep.form.A * deep.h;
  for (int v = 0; v < deep.g.vertex_count(); ++v) {
    if (v == deep.g.boundary[0] || v == deep.g.boundary[1] || v == deep.g.boundary[2]) continue;
    CHECK(std::abs(residual[v]) < 1e-9);
  }
  CHECK(deep.h.minCoeff() >= -1e-12);
  CHECK(deep.h.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("one-level extension agrees with the global minimizer") {
  const auto spec = sg2_spec(3);
  const GasketGraph g2 = build_graph(spec, 2);
  const GasketGraph g3 = build_graph(spec, 3);
  const auto lab2 = make_sg2(2);
  const Vector extended = harmonic_extend(g2, g3, lab2.h);
  const auto lab3 = make_sg2(3);
  REQUIRE(extended.size() == lab3.h.size());
  CHECK((extended - lab3.h).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("extension preserves energy exactly") {
  const auto spec = sg2_spec(4);
  GasketGraph prev = build_graph(spec, 0);
  Vector f(3);
  f << 1.0, 0.0, 0.0;
  const ScaledFormParams params = ScaledFormParams::make(spec);
  for (int k = 1; k <= 4; ++k) {
    const GasketGraph next = build_graph(spec, k);
    f = harmonic_extend(prev, next, f);
    const QuadraticForm form = assemble_form(next, params);
    CHECK(form.energy(f) == doctest::Approx(2.0).epsilon(1e-12));
    prev = next;
  }
}

TEST_CASE("harmonic part is energy-orthogonal to interior perturbations") {
  const auto lab = make_sg2(3);
  Vector v = random_vector(lab.g.vertex_count(), 777, 0);
  for (int b : lab.g.boundary) v[b] = 0.0;
  const double lhs = lab.form.energy(lab.h + v);
  const double rhs = lab.form.energy(lab.h) + lab.form.energy(v);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("cell energy measure splits the total energy") {
  const auto lab1 = make_sg2(1);
  const CellMeasure gamma1 = cell_energy_measure(lab1.g, lab1.params, lab1.h);
  REQUIRE(gamma1.mass.size() == 3);
  CHECK(gamma1.mass[0] == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(gamma1.mass[1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(gamma1.mass[2] == doctest::Approx(0.4).epsilon(1e-12));

  const auto lab = make_sg2(4);
  const Vector f = random_vector(lab.g.vertex_count(), 778, 1);
  const CellMeasure gamma = cell_energy_measure(lab.g, lab.params, f);
  CHECK(gamma.total() == doctest::Approx(lab.form.energy(f)).epsilon(1e-12));
}

TEST_CASE("vertex energy measure satisfies the product rule") {
  const auto lab = make_sg2(3);
  const int n = lab.g.vertex_count();
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const Vector f = random_vector(n, 101, 2 * trial);
    const Vector g = random_vector(n, 101, 2 * trial + 1);
    const VertexMeasure gamma = vertex_energy_measure(lab.form, f);
    double lhs = 0.0;
    for (int v = 0; v < n; ++v) lhs += g[v] * gamma.mass[static_cast<std::size_t>(v)];
    const double rhs = lab.form.energy(f, f.cwiseProduct(g)) -
                       0.5 * lab.form.energy(f.cwiseProduct(f), g);
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
    CHECK(gamma.total() == doctest::Approx(lab.form.energy(f)).epsilon(1e-12));
  }
}

TEST_CASE("degenerate boundary data is rejected") {
  const auto lab = make_sg2(2);
  CHECK_THROWS(dirichlet_solve(lab.form, {}, {}));
  CHECK_THROWS(dirichlet_solve(lab.form, {0, 0}, {1.0, 0.0}));
  CHECK_THROWS(trace_form(lab.form, {0, 0, 1}));

  const GasketGraph g1 = build_graph(sg2_spec(2), 1);
  const GasketGraph g2 = build_graph(sg2_spec(2), 2);
  Vector wrong(4);
  wrong.setZero();
  CHECK_THROWS(harmonic_extend(g1, g2, wrong));
}

} // TEST_SUITE

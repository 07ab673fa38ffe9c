// Unit tests: walk operator assembly, exact exit times, heat-kernel rows,
// and seeded Monte Carlo estimates.
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gasketlab/stochastic.hpp"
#include "test_support.hpp"

using namespace gasketlab;
using testlab::make_sg2;

namespace {

QuadraticForm path_form() {
  QuadraticForm form;
  form.n = 3;
  std::vector<Eigen::Triplet<double>> trip = {
      {0, 0, 1.0},  {1, 1, 2.0},  {2, 2, 1.0},
      {0, 1, -1.0}, {1, 0, -1.0}, {1, 2, -1.0}, {2, 1, -1.0}};
  form.A.resize(3, 3);
  form.A.setFromTriplets(trip.begin(), trip.end());
  return form;
}

QuadraticForm two_state_form() {
  QuadraticForm form;
  form.n = 2;
  std::vector<Eigen::Triplet<double>> trip = {
      {0, 0, 1.0}, {1, 1, 1.0}, {0, 1, -1.0}, {1, 0, -1.0}};
  form.A.resize(2, 2);
  form.A.setFromTriplets(trip.begin(), trip.end());
  return form;
}

} // namespace

TEST_SUITE("stochastic") {

TEST_CASE("walk rows are stochastic and laziness sits on the diagonal") {
  const QuadraticForm tri = base_form(2);
  const WalkOperator plain = build_walk(tri, 0.0);
  const WalkOperator lazy = build_walk(tri, 0.5);
  for (int u = 0; u < 3; ++u) {
    double row_plain = 0.0, row_lazy = 0.0;
    for (int v = 0; v < 3; ++v) {
      row_plain += plain.P.coeff(u, v);
      row_lazy += lazy.P.coeff(u, v);
      if (u != v) {
        CHECK(plain.P.coeff(u, v) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(lazy.P.coeff(u, v) == doctest::Approx(0.25).epsilon(1e-14));
      }
    }
    CHECK(plain.P.coeff(u, u) == 0.0);
    CHECK(lazy.P.coeff(u, u) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(row_plain == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(row_lazy == doctest::Approx(1.0).epsilon(1e-14));
  }
  double pi_sum = 0.0;
  for (double p : plain.stationary) pi_sum += p;
  CHECK(pi_sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(build_walk(tri, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_walk(tri, -0.1), std::invalid_argument);
}

TEST_CASE("walk is reversible for its stationary measure") {
  const auto lab = make_sg2(3);
  const WalkOperator walk = build_walk(lab.form, 0.5);
  for (int u = 0; u < walk.size(); ++u) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(walk.P, u); it; ++it) {
      const double lhs = walk.stationary[static_cast<std::size_t>(u)] * it.value();
      const double rhs = walk.stationary[static_cast<std::size_t>(it.col())] *
                         walk.P.coeff(it.col(), u);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    }
  }
  // uniform cell mass split over corners reproduces the stationary measure
  for (int v = 0; v < walk.size(); ++v)
    CHECK(walk.stationary[static_cast<std::size_t>(v)] ==
          doctest::Approx(lab.mv.mass[static_cast<std::size_t>(v)]).epsilon(1e-12));
}

TEST_CASE("path graph exit times match hand computation") {
  const WalkOperator walk = build_walk(path_form(), 0.0);
  CHECK(exit_time_exact(walk, {1}, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(exit_time_exact(walk, {0, 1}, 1) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(exit_time_exact(walk, {0, 1}, 0) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK_THROWS_AS(exit_time_exact(walk, {}, 0), std::invalid_argument);
  CHECK_THROWS_AS(exit_time_exact(walk, {0, 1, 2}, 0), std::invalid_argument);
  CHECK_THROWS_AS(exit_time_exact(walk, {0, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(exit_time_exact(walk, {0, 7}, 0), std::out_of_range);
}

TEST_CASE("corner exit times are self-similar across depth") {
  for (int depth : {3, 4}) {
    const auto lab = make_sg2(depth);
    const WalkOperator walk = build_walk(lab.form, 0.0);
    const double el = lab.g.edge_length;
    const double t2 = exit_time_exact(walk, lab.space.ball(0, 2.0 * el), 0);
    const double t4 = exit_time_exact(walk, lab.space.ball(0, 4.0 * el), 0);
    CHECK(t2 == doctest::Approx(3.5).epsilon(1e-9));
    CHECK(t4 == doctest::Approx(15.25).epsilon(1e-9));
    CHECK(t4 > t2);
  }
}

TEST_CASE("heat kernel rows integrate to one and are symmetric") {
  const auto lab = make_sg2(3);
  const WalkOperator walk = build_walk(lab.form, 0.5);
  VertexMeasure pi;
  pi.mass = walk.stationary;

  const Vector row = heat_kernel_row(walk, 3, 0, pi);
  double total = 0.0;
  for (int v = 0; v < walk.size(); ++v)
    total += row[v] * pi.mass[static_cast<std::size_t>(v)];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  const int probes[] = {0, 5, 17, 29};
  for (int x : probes) {
    const Vector px = heat_kernel_row(walk, 7, x, pi);
    for (int y : probes)
      CHECK(px[y] == doctest::Approx(heat_kernel_row(walk, 7, y, pi)[x]).epsilon(1e-10));
  }

  // the lazy walk mixes: density flattens to one
  const Vector late = heat_kernel_row(walk, 5000, 0, pi);
  for (int v = 0; v < walk.size(); ++v)
    CHECK(std::abs(late[v] - 1.0) < 0.01);

  CHECK_THROWS_AS(heat_kernel_row(walk, 0, 0, pi), std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel_row(walk, 1000001, 0, pi), std::invalid_argument);
  VertexMeasure bad;
  bad.mass.assign(2, 0.5);
  CHECK_THROWS_AS(heat_kernel_row(walk, 1, 0, bad), std::invalid_argument);
}

TEST_CASE("Monte Carlo walks are deterministic in the seed") {
  const WalkOperator flip = build_walk(two_state_form(), 0.0);
  const McStats hop = walk_montecarlo(flip, 0, [](int v) { return v == 1; }, 200, 77);
  CHECK(hop.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hop.stderr_mean == 0.0);
  CHECK(hop.trials == 200u);

  const auto lab = make_sg2(3);
  const WalkOperator walk = build_walk(lab.form, 0.0);
  const std::vector<int> ball = lab.space.ball(0, 0.5);
  const McStats a = walk_montecarlo_exit(walk, 0, ball, 3000, 9001);
  const McStats b = walk_montecarlo_exit(walk, 0, ball, 3000, 9001);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_mean == b.stderr_mean);

  // 4 sigma band around the exact answer (r = 4 * edge at depth 3)
  const double exact = exit_time_exact(walk, ball, 0);
  CHECK(exact == doctest::Approx(15.25).epsilon(1e-9));
  CHECK(std::abs(a.mean - exact) <= 4.0 * a.stderr_mean);

  CHECK_THROWS_AS(walk_montecarlo(flip, 0, [](int) { return true; }, 0, 1),
                  std::invalid_argument);
}

} // TEST_SUITE

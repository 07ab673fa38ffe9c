// Unit tests: finite metric spaces, chain metrics, midpoints, and nets.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gasketlab/chainmetric.hpp"
#include "gasketlab/rng.hpp"
#include "test_support.hpp"

using namespace gasketlab;
using testlab::make_sg2;

namespace {

FiniteMetricSpace path_space() {
  VertexMeasure m;
  m.mass = {1.0, 1.0, 1.0};
  return FiniteMetricSpace::from_points({{0.0}, {1.0}, {2.0}}, std::move(m));
}

} // namespace

TEST_SUITE("chainmetric") {

TEST_CASE("graph space satisfies the metric axioms") {
  const auto lab = make_sg2(3);
  const FiniteMetricSpace& s = lab.space;
  CHECK(s.diameter() == doctest::Approx(1.0).epsilon(1e-15));
  SplitMix64 rng = stream_rng(515151, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n)));
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n)));
    const int z = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n)));
    CHECK(s.d(x, x) == 0.0);
    CHECK(s.d(x, y) == doctest::Approx(s.d(y, x)).epsilon(1e-15));
    CHECK(s.d(x, y) <= s.d(x, z) + s.d(z, y) + 1e-12);
    if (x != y) CHECK(s.d(x, y) >= s.edge_length - 1e-15);
  }
}

TEST_CASE("strict balls and their masses") {
  const auto lab = make_sg2(3);
  const int q0 = lab.g.boundary[0];
  const auto tight = lab.space.ball(q0, lab.g.edge_length);
  REQUIRE(tight.size() == 1);
  CHECK(tight[0] == q0);
  CHECK(lab.space.ball_mass(q0, lab.g.edge_length) ==
        doctest::Approx(lab.mv.mass[static_cast<std::size_t>(q0)]).epsilon(1e-14));
  CHECK(lab.space.ball(q0, 2.0).size() == static_cast<std::size_t>(lab.space.n));
}

TEST_CASE("coarse chains reduce to the metric itself") {
  const auto lab = make_sg2(3);
  SplitMix64 rng = stream_rng(626262, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(lab.space.n)));
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(lab.space.n)));
    CHECK(chain_metric(lab.space, 1.5, x, y) == doctest::Approx(lab.space.d(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("edge-scale chains follow the graph geodesics") {
  const auto lab = make_sg2(4);
  const double eps = 2.0 * lab.g.edge_length;
  const int q0 = lab.g.boundary[0];
  const int q1 = lab.g.boundary[1];
  CHECK(chain_metric(lab.space, eps, q0, q1) == doctest::Approx(1.0).epsilon(1e-12));
  const auto path = chain_path(lab.space, eps, q0, q1);
  REQUIRE(path.size() >= 2);
  CHECK(path.front() == q0);
  CHECK(path.back() == q1);
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double hop = lab.space.d(path[i - 1], path[i]);
    CHECK(hop < eps);
    total += hop;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("too-fine chains disconnect the space") {
  const auto lab = make_sg2(2);
  const double eps = lab.g.edge_length;   // hops must be strictly shorter
  const int q0 = lab.g.boundary[0];
  const int q1 = lab.g.boundary[1];
  CHECK(chain_metric(lab.space, eps, q0, q1) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(chain_path(lab.space, eps, q0, q1), std::runtime_error);
}

TEST_CASE("midpoint of the three-point path") {
  const FiniteMetricSpace s = path_space();
  CHECK(chain_metric(s, 1.5, 0, 2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(chain_midpoint(s, 1.5, 0, 2) == 1);
  CHECK(chain_midpoint(s, 1.5, 1, 1) == 1);
}

TEST_CASE("midpoints satisfy the five-epsilon bounds") {
  const auto lab = make_sg2(4);
  const double eps = 0.125;
  SplitMix64 rng = stream_rng(737373, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(lab.space.n)));
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(lab.space.n)));
    const int z = chain_midpoint(lab.space, eps, x, y);
    const double dxy = chain_metric(lab.space, eps, x, y);
    REQUIRE(std::isfinite(dxy));
    CHECK(std::abs(2.0 * chain_metric(lab.space, eps, x, z) - dxy) <= 5.0 * eps + 1e-12);
    CHECK(std::abs(2.0 * chain_metric(lab.space, eps, z, y) - dxy) <= 5.0 * eps + 1e-12);
  }
}

TEST_CASE("geodesic graph metric has chain constant one") {
  const auto lab = make_sg2(3);
  const double cc = chain_constant(lab.space, {0.3, 4.0 * lab.g.edge_length});
  CHECK(cc == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("straight-line metric pays a detour around the holes") {
  const auto lab = make_sg2(3);
  const FiniteMetricSpace se =
      FiniteMetricSpace::from_points(embed_vertices(lab.g), lab.mv);
  const double cc = chain_constant(se, {0.15});
  CHECK(cc == doctest::Approx(1.51185789204).epsilon(1e-9));
}

TEST_CASE("greedy nets are separated, covering, and deterministic") {
  const auto lab = make_sg2(4);
  const double eps = 0.125;
  const auto net = epsilon_net(lab.space, eps);
  CHECK(net == epsilon_net(lab.space, eps));
  REQUIRE(!net.empty());
  CHECK(net.front() == 0);
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j)
      CHECK(lab.space.d(net[i], net[j]) >= eps - 1e-15);
  for (int v = 0; v < lab.space.n; ++v) {
    double best = std::numeric_limits<double>::infinity();
    for (int z : net) best = std::min(best, lab.space.d(v, z));
    CHECK(best < eps);
  }
  CHECK(epsilon_net(lab.space, 5.0).size() == 1);
}

TEST_CASE("net sizes at depth five are pinned") {
  const auto lab = make_sg2(5);
  CHECK(epsilon_net(lab.space, 0.25).size() == 14);
  CHECK(epsilon_net(lab.space, 0.125).size() == 44);
  CHECK(epsilon_net(lab.space, 0.0625).size() == 109);
}

} // TEST_SUITE

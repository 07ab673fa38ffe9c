#include "gasketlab/stochastic.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gasketlab/rng.hpp"

namespace gasketlab {

WalkOperator build_walk(const QuadraticForm& form, double theta) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw std::invalid_argument("build_walk: theta outside [0,1)");
  const int n = form.n;
  std::vector<double> ctot(static_cast<std::size_t>(n), 0.0);
  for (int col = 0; col < form.A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(form.A, col); it; ++it) {
      if (it.row() == it.col()) ctot[static_cast<std::size_t>(it.row())] = it.value();
    }
  }
  double total = 0.0;
  for (double c : ctot) {
    if (!(c > 0.0)) throw std::invalid_argument("build_walk: isolated vertex");
    total += c;
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(form.A.nonZeros()));
  for (int col = 0; col < form.A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(form.A, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      if (r == c) continue;
      trip.emplace_back(r, c, (1.0 - theta) * (-it.value()) / ctot[static_cast<std::size_t>(r)]);
    }
  }
  if (theta > 0.0)
    for (int v = 0; v < n; ++v) trip.emplace_back(v, v, theta);
  WalkOperator w;
  w.theta = theta;
  w.P.resize(n, n);
  w.P.setFromTriplets(trip.begin(), trip.end());
  w.stationary.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    w.stationary[static_cast<std::size_t>(v)] = ctot[static_cast<std::size_t>(v)] / total;
  return w;
}

double exit_time_exact(const WalkOperator& walk, const std::vector<int>& ball, int x) {
  const int n = walk.size();
  if (ball.empty()) throw std::invalid_argument("exit_time_exact: empty ball");
  if (static_cast<int>(ball.size()) >= n)
    throw std::invalid_argument("exit_time_exact: ball equals whole space");
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const int v = ball[i];
    if (v < 0 || v >= n) throw std::out_of_range("exit_time_exact: ball index");
    pos[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  if (pos[static_cast<std::size_t>(x)] == -1)
    throw std::invalid_argument("exit_time_exact: start outside ball");

  const int nb = static_cast<int>(ball.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < nb; ++i) {
    trip.emplace_back(i, i, 1.0);
    const int v = ball[static_cast<std::size_t>(i)];
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(walk.P, v); it; ++it) {
      const int j = pos[static_cast<std::size_t>(it.col())];
      if (j != -1) trip.emplace_back(i, j, -it.value());
    }
  }
  Eigen::SparseMatrix<double> sys(nb, nb);
  sys.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sys);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("exit_time_exact: singular exit system");
  const Vector tau = lu.solve(Vector::Ones(nb));
  return tau[pos[static_cast<std::size_t>(x)]];
}

Vector heat_kernel_row(const WalkOperator& walk, int k, int x, const VertexMeasure& m) {
  if (k < 1) throw std::invalid_argument("heat_kernel_row: k must be >= 1");
  if (k > 1000000) throw std::invalid_argument("heat_kernel_row: k beyond budget");
  const int n = walk.size();
  if (static_cast<int>(m.mass.size()) != n)
    throw std::invalid_argument("heat_kernel_row: measure size mismatch");
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(n);
  mu[x] = 1.0;
  for (int step = 0; step < k; ++step) mu = mu * walk.P;
  Vector density(n);
  for (int v = 0; v < n; ++v) {
    if (!(m.mass[static_cast<std::size_t>(v)] > 0.0))
      throw std::invalid_argument("heat_kernel_row: measure must be positive");
    density[v] = mu[v] / m.mass[static_cast<std::size_t>(v)];
  }
  return density;
}

McStats walk_montecarlo(const WalkOperator& walk, int x, const std::function<bool(int)>& stop,
                        std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("walk_montecarlo: trials must be >= 1");
  constexpr std::uint64_t kStepCap = 10000000;
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng = stream_rng(seed, trial);
    int v = x;
    std::uint64_t steps = 0;
    while (!stop(v)) {
      if (++steps > kStepCap) throw std::runtime_error("walk_montecarlo: step cap exceeded");
      const double u = rng.uniform();
      double acc = 0.0;
      int next = v;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(walk.P, v); it; ++it) {
        acc += it.value();
        next = static_cast<int>(it.col());
        if (u < acc) break;
      }
      v = next;
    }
    const double s = static_cast<double>(steps);
    sum += s;
    sumsq += s * s;
  }
  McStats st;
  st.trials = trials;
  st.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    const double var =
        std::max(0.0, (sumsq - sum * sum / static_cast<double>(trials)) /
                          static_cast<double>(trials - 1));
    st.stderr_mean = std::sqrt(var / static_cast<double>(trials));
  }
  return st;
}

McStats walk_montecarlo_exit(const WalkOperator& walk, int x, const std::vector<int>& ball,
                             std::uint64_t trials, std::uint64_t seed) {
  std::vector<bool> inside(static_cast<std::size_t>(walk.size()), false);
  for (int v : ball) inside[static_cast<std::size_t>(v)] = true;
  return walk_montecarlo(
      walk, x, [&inside](int v) { return !inside[static_cast<std::size_t>(v)]; }, trials, seed);
}

} // namespace gasketlab

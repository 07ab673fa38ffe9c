// stochastic.hpp -- conductance random walk: exact exit times, heat-kernel
// rows by repeated sparse application, and seeded Monte Carlo trajectories.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gasketlab/forms.hpp"

namespace gasketlab {

struct WalkOperator {
  double theta = 0.0;                              // laziness, stays put with prob theta
  Eigen::SparseMatrix<double, Eigen::RowMajor> P;  // row-stochastic
  std::vector<double> stationary;                  // proportional to vertex conductance, sums to 1

  int size() const { return static_cast<int>(P.rows()); }
};

// off-diagonal transition (1-theta) c(u,v)/c(u), diagonal theta; reversible
// with respect to the stationary measure; throws on isolated vertices
WalkOperator build_walk(const QuadraticForm& form, double theta);

// expected steps to leave the given ball, starting at x inside it: solves
// (I - P restricted to the ball) tau = 1; the ball must be a proper subset
double exit_time_exact(const WalkOperator& walk, const std::vector<int>& ball, int x);

// p_k(x, .) = (P^k)(x, .) / m(.), computed by k row-vector applications;
// k is capped at 10^6
Vector heat_kernel_row(const WalkOperator& walk, int k, int x, const VertexMeasure& m);

struct McStats {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::uint64_t trials = 0;
};

// steps until stop(v) becomes true, averaged over seeded trials; per-trial
// streams derive from (seed, trial) so the schedule cannot change results
McStats walk_montecarlo(const WalkOperator& walk, int x, const std::function<bool(int)>& stop,
                        std::uint64_t trials, std::uint64_t seed);

// convenience: Monte Carlo exit time from a ball given as a vertex list
McStats walk_montecarlo_exit(const WalkOperator& walk, int x, const std::vector<int>& ball,
                             std::uint64_t trials, std::uint64_t seed);

} // namespace gasketlab

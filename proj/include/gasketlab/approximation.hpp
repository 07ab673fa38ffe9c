// approximation.hpp -- tent functions, Lipschitz partitions of unity, ball
// average projections, and piecewise-harmonic approximation.
#pragma once

#include <vector>

#include "gasketlab/chainmetric.hpp"
#include "gasketlab/forms.hpp"
#include "gasketlab/scaling.hpp"

namespace gasketlab {

// values (1 - d(x,.)/r)^+; equals 1 at x, vanishes outside B(x,r), 1/r-Lipschitz
Vector tent_function(const FiniteMetricSpace& s, int x, double r);

struct PartitionFamily {
  double eps = 0.0;
  std::vector<int> net;
  std::vector<Vector> phi;   // one bump per net point, same order as net

  Vector sum() const;        // pointwise sum, 1 everywhere by construction
};

// phi_z = f_{z,2eps} / sum_w f_{w,2eps}. Throws when the denominator drops
// below 1/2 anywhere, which means the net is not maximal at scale eps.
PartitionFamily partition_of_unity(const FiniteMetricSpace& s, const std::vector<int>& net,
                                   double eps);

// f_n = sum_z (m-weighted average of f over B(z,1/n)) phi_z with a greedy
// (1/n)-net; sup error controlled by the modulus of continuity of f at 3/n
Vector ball_average_projection(const FiniteMetricSpace& s, const Vector& f, int n_scale);

// Piecewise-harmonic approximation at dyadic resolution 2^{-n}: vertices
// incident to an edge whose endpoints lie in different 2^{-n} value bins are
// pinned to their f values and the rest is filled in harmonically. Guarantees
// |f - f_n| <= 2^{-n} everywhere, energy(f_n) non-decreasing in n, and the
// exact energy split energy(f) = energy(f_n) + energy(f - f_n). Requires
// f >= 0 unless split_negative is set, in which case the positive and
// negative parts are approximated separately and recombined.
Vector piecewise_harmonic_approx(const QuadraticForm& form, const Vector& f, int n,
                                 bool split_negative = false);

// Gamma(h)(B(x,r)) * Psi(r) / inf_a sum_{annulus} |h-a|^2 dm with the infimum
// realized by the m-weighted mean over B(x,2r) \ B(x,r). Returns 0 for
// constant h; throws when the annulus has zero mass.
double reverse_poincare_check(const QuadraticForm& form, const FiniteMetricSpace& s,
                              const ScalingProfile& profile, const Vector& h, int x, double r);

} // namespace gasketlab

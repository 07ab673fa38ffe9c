// diagnostics.hpp -- measure comparison: volume doubling, Poincare constants,
// differentiation and maximal-function checks, concentration profiles, and
// heat-kernel envelope fits.
#pragma once

#include <cstdint>
#include <vector>

#include "gasketlab/chainmetric.hpp"
#include "gasketlab/forms.hpp"
#include "gasketlab/scaling.hpp"

namespace gasketlab {

// max over centers and radii of m(B(x,2r))/m(B(x,r)); all centers scanned up
// to 2000 points, seeded sampling beyond
double vd_constant(const FiniteMetricSpace& s, const std::vector<double>& radii,
                   std::uint64_t seed = 40961);

// max over centers and sample functions of the m-variance of f over B(x,r)
// divided by Psi(r) * Gamma(f)(B(x,2r)); samples with zero local energy skip
double poincare_constant(const QuadraticForm& form, const FiniteMetricSpace& s,
                         const ScalingProfile& profile, double r,
                         const std::vector<Vector>& samples, std::uint64_t seed = 40963);

// nu(B(x,r))/m(B(x,r)) per radius; both measures live on cells, a cell
// belongs to the ball when its nearest vertex is strictly inside
std::vector<double> differentiation_ratios(const FiniteMetricSpace& s, const GasketGraph& g,
                                           const CellMeasure& nu, const CellMeasure& m, int x,
                                           const std::vector<double>& radii);

// dyadic multiples of the edge length up to just past the diameter
std::vector<double> resolution_radii(const FiniteMetricSpace& s);

// max over the lambda grid of lambda * m{M nu > lambda} / nu(X), where the
// maximal function M nu(x) ranges over resolution radii and the superlevel
// set is measured with the space's point measure
double maximal_inequality_check(const FiniteMetricSpace& s, const GasketGraph& g,
                                const CellMeasure& nu, const CellMeasure& m,
                                const std::vector<double>& lambdas);

struct ConcentrationProfile {
  int depth = 0;
  std::vector<double> density;    // normalized density ratios, sorted descending
  std::vector<double> lorenz_m;   // cumulative normalized m after sorting
  std::vector<double> lorenz_g;   // cumulative normalized gamma
  double minimal_mass = 0.0;      // m-mass carrying 1-delta of gamma, interpolated
  double entropy_rate = 0.0;      // (1/depth) sum g log(g/m), depth 0 treated as 1
};

// sorts cells by density gamma/m descending and reads the inverse Lorenz
// curve at height 1-delta with linear interpolation inside the crossing cell
ConcentrationProfile concentration_profile(const CellMeasure& gamma, const CellMeasure& m,
                                           double delta);

struct EnvelopeSample {
  int depth = 0;
  double t = 0.0;           // continuum time
  double dist = 0.0;        // d(x,y)
  double p = 0.0;           // heat kernel density p_t(x,y)
  double ball_mass = 0.0;   // m(B(x, Psi^{-1}(t)))
};

struct EnvelopeReport {
  double c1 = 0.0;          // upper envelope rate, from regression
  double c2 = 1.0;          // distance rescale inside Phi (convention: 1)
  double C1 = 0.0;          // upper envelope amplitude, lifted to cover all samples
  double c3 = 0.0;          // near-diagonal floor of p * ball_mass
  double delta = 0.5;       // near-diagonal window: dist <= delta * Psi^{-1}(t)
  int upper_count = 0;
  int lower_count = 0;
  int upper_violations = 0;
  int lower_violations = 0;
};

// fits (c1, C1) to p*mB <= C1 exp(-c1 Phi(c2 d, t)) by regressing log(p*mB)
// against Phi over the positive samples, and c3 to the near-diagonal floor
// p*mB >= c3; reports violation counts at the fitted constants
EnvelopeReport heat_kernel_envelope_check(const std::vector<EnvelopeSample>& samples,
                                          const ScalingProfile& profile);

} // namespace gasketlab

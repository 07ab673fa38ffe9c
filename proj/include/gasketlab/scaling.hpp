// scaling.hpp -- walk dimensions, the piecewise space-time scale function,
// its Legendre-type companion Phi, and the regime classifier.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gasketlab/geometry.hpp"

namespace gasketlab {

// beta_l = log_l(#S_l / r_l). Asserts beta_l > 2 and, independently, the
// exact rational inequality #S_l / r_l > l^2. Either failing is a bug.
double walk_dimension(int N, int l);

// Piecewise power scale: Psi(s) = (L_n s)^{beta_n} / T_n on [1/L_n, 1/L_{n-1}]
// and s^{beta_min} on [1, inf). Below the smallest breakpoint the deepest
// branch extends as a power law. Continuous, strictly increasing, Psi(0) = 0.
struct ScalingProfile {
  int dimension = 0;
  std::vector<int> levels;     // l_1..l_n
  std::vector<double> beta;    // beta_{l_k} aligned with levels
  std::vector<double> L;       // L_0..L_n, L_0 = 1
  std::vector<double> T;       // T_0..T_n, T_0 = 1
  double beta_min = 0.0;
  double beta_max = 0.0;

  double psi(double s) const;
  double psi_inverse(double t) const;   // monotone bisection

  static ScalingProfile make(const GasketSpec& spec);
};

// Phi(R,t) = sup_{r>0} (R/r - t/Psi(r)), located by a log-space grid scan
// plus golden-section refinement. Phi(0,t) = 0.
double phi_eval(const std::function<double(double)>& psi, double R, double t);
double phi_eval(const ScalingProfile& profile, double R, double t);

// closed form for Psi(r) = r^beta, beta > 1:
// Phi = (beta-1) beta^{-beta/(beta-1)} (R^beta/t)^{1/(beta-1)}
double phi_power_law(double beta, double R, double t);

struct RegularityEstimate {
  double beta0 = 0.0;   // smallest chordal exponent over the grid
  double beta1 = 0.0;   // largest chordal exponent
  double c_psi = 1.0;   // multiplicative slack (1 when exponents are chordal)
};

// Empirical constants with C^{-1}(R/r)^{beta0} <= Psi(R)/Psi(r) <= C(R/r)^{beta1}
// over all grid pairs r < R. Throws if Psi fails to be increasing on the grid.
RegularityEstimate verify_regularity(const ScalingProfile& profile,
                                     const std::vector<double>& grid);

enum class Regime { singular, gaussian, inconclusive };
std::string regime_name(Regime tag);

struct RegimeReport {
  Regime tag = Regime::inconclusive;
  double decay_exponent = 0.0;      // fitted beta_eff from lambda^2 Psi(r/lambda)/Psi(r)
  double min_quantity = 0.0;        // smallest lambda^2 Psi(r/lambda)/Psi(r) seen
  double psi_over_r2_floor = 0.0;   // min of Psi(r)/r^2 over the finest radii
  double psi_over_r2_slope = 0.0;   // log-log slope of Psi(r)/r^2 at small r
};

// Finite rendering of the dichotomy: "singular" when the fitted space-time
// exponent exceeds 2 (so lambda^2 Psi(r/lambda)/Psi(r) decays) and Psi(r)/r^2
// tends to 0; "gaussian" when the exponent is 2 and Psi(r)/r^2 stays bounded
// away from 0; "inconclusive" otherwise. Thresholds are conventions of this
// implementation, reported alongside the tag.
RegimeReport classify_scale_function(const std::function<double(double)>& psi);
RegimeReport classify_regime(const ScalingProfile& profile);

} // namespace gasketlab

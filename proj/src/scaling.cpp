#include "gasketlab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gasketlab/forms.hpp"
#include "gasketlab/rational.hpp"
#include "gasketlab/wideint.hpp"

namespace gasketlab {

double walk_dimension(int N, int l) {
  const Rational r = resistance_scale(N, l);
  const WideInt s = s_count(l, N);
  const Rational ratio = Rational(s) / r;
  // elementary route: #S_l / r_l > l^2, checked exactly
  if (!(ratio > Rational(WideInt(l) * l)))
    throw std::runtime_error("walk_dimension: #S_l/r_l <= l^2, computation bug");
  const double beta = std::log(to_double(ratio)) / std::log(static_cast<double>(l));
  if (!(beta > 2.0))
    throw std::runtime_error("walk_dimension: beta <= 2, computation bug");
  return beta;
}

ScalingProfile ScalingProfile::make(const GasketSpec& spec) {
  spec.validate();
  ScalingProfile p;
  p.dimension = spec.dimension;
  p.levels = spec.levels;
  p.L.assign(1, 1.0);
  p.T.assign(1, 1.0);
  WideInt L_exact = 1;
  Rational T_exact = 1;
  for (int l : spec.levels) {
    p.beta.push_back(walk_dimension(spec.dimension, l));
    L_exact *= l;
    T_exact *= Rational(s_count(l, spec.dimension)) / resistance_scale(spec.dimension, l);
    p.L.push_back(to_double(L_exact));
    p.T.push_back(to_double(T_exact));
  }
  p.beta_min = *std::min_element(p.beta.begin(), p.beta.end());
  p.beta_max = *std::max_element(p.beta.begin(), p.beta.end());
  return p;
}

double ScalingProfile::psi(double s) const {
  if (s < 0.0) throw std::invalid_argument("psi: negative argument");
  if (s == 0.0) return 0.0;
  if (s >= 1.0) return std::pow(s, beta_min);
  const std::size_t n_max = levels.size();
  std::size_t n = n_max;
  for (std::size_t k = 1; k <= n_max; ++k) {
    if (s >= 1.0 / L[k]) {
      n = k;
      break;
    }
  }
  return std::pow(L[n] * s, beta[n - 1]) / T[n];
}

double ScalingProfile::psi_inverse(double t) const {
  if (t < 0.0) throw std::invalid_argument("psi_inverse: negative argument");
  if (t == 0.0) return 0.0;
  double lo = 1.0, hi = 1.0;
  while (psi(hi) < t) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("psi_inverse: argument out of range");
  }
  while (psi(lo) > t) {
    lo *= 0.5;
    if (lo < 1e-300) throw std::runtime_error("psi_inverse: argument out of range");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi(mid) < t)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double phi_power_law(double beta, double R, double t) {
  if (!(beta > 1.0)) throw std::invalid_argument("phi_power_law: requires beta > 1");
  if (!(t > 0.0)) throw std::invalid_argument("phi_power_law: requires t > 0");
  if (R <= 0.0) return 0.0;
  const double q = 1.0 / (beta - 1.0);
  return (beta - 1.0) * std::pow(beta, -beta * q) * std::pow(std::pow(R, beta) / t, q);
}

double phi_eval(const std::function<double(double)>& psi, double R, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("phi_eval: requires t > 0");
  if (R < 0.0) throw std::invalid_argument("phi_eval: requires R >= 0");
  if (R == 0.0) return 0.0;

  const auto value = [&](double u) {
    const double r = std::exp(u);
    return R / r - t / psi(r);
  };

  // coarse scan in log r, widened until the maximum is interior
  double u_lo = std::log(1e-12), u_hi = std::log(1e12);
  int best = -1;
  const int grid = 600;
  std::vector<double> us, vs;
  for (int attempt = 0; attempt < 8; ++attempt) {
    us.clear();
    vs.clear();
    for (int i = 0; i <= grid; ++i) {
      const double u = u_lo + (u_hi - u_lo) * i / grid;
      us.push_back(u);
      vs.push_back(value(u));
    }
    best = 0;
    for (int i = 1; i <= grid; ++i)
      if (vs[static_cast<std::size_t>(i)] > vs[static_cast<std::size_t>(best)]) best = i;
    if (best > 0 && best < grid) break;
    const double span = u_hi - u_lo;
    if (best == 0)
      u_lo -= span;
    else
      u_hi += span;
    best = -1;
  }
  if (best <= 0 || best >= grid)
    throw std::runtime_error("phi_eval: bracketing failed");

  // golden-section refinement on the bracketing interval
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = us[static_cast<std::size_t>(best - 1)];
  double b = us[static_cast<std::size_t>(best + 1)];
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = value(x1), f2 = value(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = value(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = value(x1);
    }
  }
  const double sup = std::max(f1, f2);
  return std::max(sup, 0.0);
}

double phi_eval(const ScalingProfile& profile, double R, double t) {
  return phi_eval([&](double r) { return profile.psi(r); }, R, t);
}

RegularityEstimate verify_regularity(const ScalingProfile& profile,
                                     const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("verify_regularity: grid too small");
  std::vector<double> g = grid;
  std::sort(g.begin(), g.end());
  RegularityEstimate est;
  est.beta0 = 1e300;
  est.beta1 = -1e300;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double r = g[i], R = g[j];
      if (!(r > 0.0) || R / r < 1.0 + 1e-12) continue;
      const double ratio = profile.psi(R) / profile.psi(r);
      if (!(ratio > 1.0))
        throw std::runtime_error("verify_regularity: scale function not increasing on grid");
      const double e = std::log(ratio) / std::log(R / r);
      est.beta0 = std::min(est.beta0, e);
      est.beta1 = std::max(est.beta1, e);
    }
  }
  est.c_psi = 1.0;   // chordal exponents make the two-sided bound tight
  return est;
}

std::string regime_name(Regime tag) {
  switch (tag) {
    case Regime::singular: return "singular";
    case Regime::gaussian: return "gaussian";
    default: return "inconclusive";
  }
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

RegimeReport classify_scale_function(const std::function<double(double)>& psi) {
  constexpr double kExponentTol = 1e-3;
  RegimeReport rep;

  // q(lambda) = min over r of lambda^2 Psi(r/lambda)/Psi(r); its log-log
  // slope against lambda estimates 2 - beta_eff
  std::vector<double> log_lambda, log_q;
  rep.min_quantity = 1e300;
  for (int a = 1; a <= 10; ++a) {
    const double lambda = std::pow(2.0, a);
    double qmin = 1e300;
    for (int k = 0; k <= 20; ++k) {
      const double r = std::pow(2.0, -k);
      const double q = lambda * lambda * psi(r / lambda) / psi(r);
      qmin = std::min(qmin, q);
    }
    rep.min_quantity = std::min(rep.min_quantity, qmin);
    log_lambda.push_back(std::log(lambda));
    log_q.push_back(std::log(qmin));
  }
  rep.decay_exponent = 2.0 - fit_slope(log_lambda, log_q);

  // behavior of Psi(r)/r^2 at the small end of the grid
  std::vector<double> log_r, log_ratio;
  rep.psi_over_r2_floor = 1e300;
  for (int k = 12; k <= 24; ++k) {
    const double r = std::pow(2.0, -k);
    const double ratio = psi(r) / (r * r);
    rep.psi_over_r2_floor = std::min(rep.psi_over_r2_floor, ratio);
    log_r.push_back(std::log(r));
    log_ratio.push_back(std::log(ratio));
  }
  rep.psi_over_r2_slope = fit_slope(log_r, log_ratio);

  const bool decays = rep.decay_exponent - 2.0 > kExponentTol &&
                      rep.psi_over_r2_slope > kExponentTol;
  const bool flat = std::abs(rep.decay_exponent - 2.0) <= kExponentTol &&
                    std::abs(rep.psi_over_r2_slope) <= kExponentTol &&
                    rep.psi_over_r2_floor > 1e-6;
  if (decays)
    rep.tag = Regime::singular;
  else if (flat)
    rep.tag = Regime::gaussian;
  else
    rep.tag = Regime::inconclusive;
  return rep;
}

RegimeReport classify_regime(const ScalingProfile& profile) {
  return classify_scale_function([&](double r) { return profile.psi(r); });
}

} // namespace gasketlab

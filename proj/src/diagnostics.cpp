#include "gasketlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gasketlab/rng.hpp"

namespace gasketlab {

namespace {

std::vector<int> scan_centers(int n, std::uint64_t seed) {
  std::vector<int> centers;
  if (n <= 2000) {
    centers.resize(static_cast<std::size_t>(n));
    std::iota(centers.begin(), centers.end(), 0);
  } else {
    centers.reserve(512);
    for (std::uint64_t i = 0; i < 512; ++i) {
      SplitMix64 rng = stream_rng(seed, i);
      centers.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
    }
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  }
  return centers;
}

double ball_mass_from_row(const FiniteMetricSpace& s, const std::vector<double>& dist,
                          double r) {
  double mass = 0.0;
  for (int v = 0; v < s.n; ++v)
    if (dist[static_cast<std::size_t>(v)] < r) mass += s.measure.mass[static_cast<std::size_t>(v)];
  return mass;
}

// nearest-vertex distance per cell, reused by the cell-ball scans
std::vector<double> cell_distances(const GasketGraph& g, const std::vector<double>& dist) {
  std::vector<double> out(g.cells.size());
  for (std::size_t w = 0; w < g.cells.size(); ++w) {
    double best = dist[static_cast<std::size_t>(g.cells[w].v[0])];
    for (std::size_t j = 1; j < g.cells[w].v.size(); ++j)
      best = std::min(best, dist[static_cast<std::size_t>(g.cells[w].v[j])]);
    out[w] = best;
  }
  return out;
}

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

double vd_constant(const FiniteMetricSpace& s, const std::vector<double>& radii,
                   std::uint64_t seed) {
  if (radii.empty()) throw std::invalid_argument("vd_constant: empty radius grid");
  for (double r : radii)
    if (!(r > 0.0)) throw std::invalid_argument("vd_constant: radii must be positive");
  double worst = 1.0;
  for (int x : scan_centers(s.n, seed)) {
    const std::vector<double> dist = s.row(x);
    for (double r : radii) {
      const double small = ball_mass_from_row(s, dist, r);
      if (!(small > 0.0)) throw std::runtime_error("vd_constant: empty ball");
      worst = std::max(worst, ball_mass_from_row(s, dist, 2.0 * r) / small);
    }
  }
  return worst;
}

double poincare_constant(const QuadraticForm& form, const FiniteMetricSpace& s,
                         const ScalingProfile& profile, double r,
                         const std::vector<Vector>& samples, std::uint64_t seed) {
  if (!(r > 0.0)) throw std::invalid_argument("poincare_constant: r must be positive");
  constexpr double kA = 2.0;   // energy collected over B(x, A r)
  std::vector<VertexMeasure> gammas;
  gammas.reserve(samples.size());
  for (const Vector& f : samples) gammas.push_back(vertex_energy_measure(form, f));
  const double psi_r = profile.psi(r);
  double worst = 0.0;
  for (int x : scan_centers(s.n, seed)) {
    const std::vector<double> dist = s.row(x);
    for (std::size_t si = 0; si < samples.size(); ++si) {
      const Vector& f = samples[si];
      double mass = 0.0, mean = 0.0;
      for (int v = 0; v < s.n; ++v) {
        if (dist[static_cast<std::size_t>(v)] < r) {
          const double mv = s.measure.mass[static_cast<std::size_t>(v)];
          mass += mv;
          mean += mv * f[v];
        }
      }
      if (!(mass > 0.0)) continue;
      mean /= mass;
      double var = 0.0;
      for (int v = 0; v < s.n; ++v) {
        if (dist[static_cast<std::size_t>(v)] < r) {
          const double d = f[v] - mean;
          var += s.measure.mass[static_cast<std::size_t>(v)] * d * d;
        }
      }
      double local_energy = 0.0;
      for (int v = 0; v < s.n; ++v)
        if (dist[static_cast<std::size_t>(v)] < kA * r)
          local_energy += gammas[si].mass[static_cast<std::size_t>(v)];
      if (!(local_energy > 0.0)) continue;
      worst = std::max(worst, var / (psi_r * local_energy));
    }
  }
  return worst;
}

std::vector<double> differentiation_ratios(const FiniteMetricSpace& s, const GasketGraph& g,
                                           const CellMeasure& nu, const CellMeasure& m, int x,
                                           const std::vector<double>& radii) {
  if (nu.mass.size() != g.cells.size() || m.mass.size() != g.cells.size())
    throw std::invalid_argument("differentiation_ratios: measure/cell count mismatch");
  const std::vector<double> dist = s.row(x);
  const std::vector<double> cd = cell_distances(g, dist);
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("differentiation_ratios: radius <= 0");
    double nb = 0.0, mb = 0.0;
    for (std::size_t w = 0; w < cd.size(); ++w) {
      if (cd[w] < r) {
        nb += nu.mass[w];
        mb += m.mass[w];
      }
    }
    if (!(mb > 0.0)) throw std::runtime_error("differentiation_ratios: empty ball");
    out.push_back(nb / mb);
  }
  return out;
}

std::vector<double> resolution_radii(const FiniteMetricSpace& s) {
  if (!(s.edge_length > 0.0))
    throw std::invalid_argument("resolution_radii: space has no graph resolution");
  const double diam = s.diameter();
  std::vector<double> radii;
  for (double r = s.edge_length; r < 2.0 * diam; r *= 2.0) radii.push_back(r);
  return radii;
}

double maximal_inequality_check(const FiniteMetricSpace& s, const GasketGraph& g,
                                const CellMeasure& nu, const CellMeasure& m,
                                const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("maximal_inequality_check: empty grid");
  const std::vector<double> radii = resolution_radii(s);
  const double nu_total = nu.total();
  if (!(nu_total > 0.0)) throw std::invalid_argument("maximal_inequality_check: zero nu");

  std::vector<double> maximal(static_cast<std::size_t>(s.n), 0.0);
  for (int x = 0; x < s.n; ++x) {
    const std::vector<double> dist = s.row(x);
    const std::vector<double> cd = cell_distances(g, dist);
    double best = 0.0;
    for (double r : radii) {
      double nb = 0.0, mb = 0.0;
      for (std::size_t w = 0; w < cd.size(); ++w) {
        if (cd[w] < r) {
          nb += nu.mass[w];
          mb += m.mass[w];
        }
      }
      if (mb > 0.0) best = std::max(best, nb / mb);
    }
    maximal[static_cast<std::size_t>(x)] = best;
  }

  double worst = 0.0;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw std::invalid_argument("maximal_inequality_check: lambda <= 0");
    double super_mass = 0.0;
    for (int x = 0; x < s.n; ++x)
      if (maximal[static_cast<std::size_t>(x)] > lambda)
        super_mass += s.measure.mass[static_cast<std::size_t>(x)];
    worst = std::max(worst, lambda * super_mass / nu_total);
  }
  return worst;
}

ConcentrationProfile concentration_profile(const CellMeasure& gamma, const CellMeasure& m,
                                           double delta) {
  if (gamma.mass.size() != m.mass.size())
    throw std::invalid_argument("concentration_profile: cell count mismatch");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("concentration_profile: delta outside (0,1)");
  const double g_total = gamma.total();
  const double m_total = m.total();
  if (!(g_total > 0.0)) throw std::invalid_argument("concentration_profile: zero gamma");
  if (!(m_total > 0.0)) throw std::invalid_argument("concentration_profile: zero m");

  const std::size_t n = gamma.mass.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> gn(n), mn(n);
  for (std::size_t w = 0; w < n; ++w) {
    gn[w] = gamma.mass[w] / g_total;
    mn[w] = m.mass[w] / m_total;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = mn[a] > 0.0 ? gn[a] / mn[a] : std::numeric_limits<double>::infinity();
    const double db = mn[b] > 0.0 ? gn[b] / mn[b] : std::numeric_limits<double>::infinity();
    return da > db;
  });

  ConcentrationProfile prof;
  prof.depth = gamma.depth;
  prof.density.reserve(n);
  prof.lorenz_m.reserve(n);
  prof.lorenz_g.reserve(n);
  double cm = 0.0, cg = 0.0;
  for (std::size_t w : order) {
    prof.density.push_back(mn[w] > 0.0 ? gn[w] / mn[w]
                                       : std::numeric_limits<double>::infinity());
    cm += mn[w];
    cg += gn[w];
    prof.lorenz_m.push_back(cm);
    prof.lorenz_g.push_back(cg);
  }

  // inverse Lorenz readout at height 1-delta, linear inside the crossing cell
  const double target = 1.0 - delta;
  double prev_m = 0.0, prev_g = 0.0;
  prof.minimal_mass = prof.lorenz_m.back();
  for (std::size_t i = 0; i < n; ++i) {
    if (prof.lorenz_g[i] >= target) {
      const double seg_g = prof.lorenz_g[i] - prev_g;
      const double frac = seg_g > 0.0 ? (target - prev_g) / seg_g : 0.0;
      prof.minimal_mass = prev_m + frac * (prof.lorenz_m[i] - prev_m);
      break;
    }
    prev_m = prof.lorenz_m[i];
    prev_g = prof.lorenz_g[i];
  }

  double kl = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    if (gn[w] > 0.0) {
      if (!(mn[w] > 0.0)) {
        kl = std::numeric_limits<double>::infinity();
        break;
      }
      kl += gn[w] * std::log(gn[w] / mn[w]);
    }
  }
  prof.entropy_rate = kl / std::max(1, gamma.depth);
  return prof;
}

EnvelopeReport heat_kernel_envelope_check(const std::vector<EnvelopeSample>& samples,
                                          const ScalingProfile& profile) {
  if (samples.empty()) throw std::invalid_argument("heat_kernel_envelope_check: no samples");
  EnvelopeReport rep;
  rep.c2 = 1.0;
  rep.delta = 0.5;

  // near-diagonal floor
  double floor_val = std::numeric_limits<double>::infinity();
  for (const EnvelopeSample& s : samples) {
    const double near = rep.delta * profile.psi_inverse(s.t);
    if (s.dist <= near) {
      ++rep.lower_count;
      floor_val = std::min(floor_val, s.p * s.ball_mass);
    }
  }
  rep.c3 = std::isfinite(floor_val) ? floor_val : 0.0;

  // upper envelope: regression of log(p * mB) on Phi(d, t) over positive p
  std::vector<double> xs, ys;
  for (const EnvelopeSample& s : samples) {
    if (s.p > 0.0) {
      xs.push_back(phi_eval(profile, rep.c2 * s.dist, s.t));
      ys.push_back(std::log(s.p * s.ball_mass));
    }
  }
  if (xs.size() < 2)
    throw std::runtime_error("heat_kernel_envelope_check: too few positive samples");
  rep.c1 = -fit_slope(xs, ys);
  double lift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) lift = std::max(lift, ys[i] + rep.c1 * xs[i]);
  rep.C1 = std::exp(lift);

  rep.upper_count = static_cast<int>(samples.size());
  std::size_t pos = 0;
  for (const EnvelopeSample& s : samples) {
    double bound = rep.C1;
    if (s.p > 0.0) {
      bound = rep.C1 * std::exp(-rep.c1 * xs[pos]);
      ++pos;
    }
    if (s.p * s.ball_mass > bound * (1.0 + 1e-9)) ++rep.upper_violations;
    const double near = rep.delta * profile.psi_inverse(s.t);
    if (s.dist <= near && s.p * s.ball_mass < rep.c3 * (1.0 - 1e-9)) ++rep.lower_violations;
  }
  return rep;
}

} // namespace gasketlab

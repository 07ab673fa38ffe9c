#include "gasketlab/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gasketlab {

Vector tent_function(const FiniteMetricSpace& s, int x, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("tent_function: r must be positive");
  const std::vector<double> dist = s.row(x);
  Vector out(s.n);
  for (int v = 0; v < s.n; ++v)
    out[v] = std::max(0.0, 1.0 - dist[static_cast<std::size_t>(v)] / r);
  return out;
}

Vector PartitionFamily::sum() const {
  if (phi.empty()) return Vector();
  Vector s = Vector::Zero(phi.front().size());
  for (const Vector& p : phi) s += p;
  return s;
}

PartitionFamily partition_of_unity(const FiniteMetricSpace& s, const std::vector<int>& net,
                                   double eps) {
  if (net.empty()) throw std::invalid_argument("partition_of_unity: empty net");
  if (!(eps > 0.0)) throw std::invalid_argument("partition_of_unity: eps must be positive");
  PartitionFamily fam;
  fam.eps = eps;
  fam.net = net;
  fam.phi.reserve(net.size());
  for (int z : net) fam.phi.push_back(tent_function(s, z, 2.0 * eps));
  Vector denom = Vector::Zero(s.n);
  for (const Vector& p : fam.phi) denom += p;
  for (int v = 0; v < s.n; ++v) {
    if (denom[v] < 0.5)
      throw std::runtime_error("partition_of_unity: tent sum below 1/2, net not maximal");
  }
  for (Vector& p : fam.phi) p = p.cwiseQuotient(denom);
  return fam;
}

Vector ball_average_projection(const FiniteMetricSpace& s, const Vector& f, int n_scale) {
  if (n_scale < 1) throw std::invalid_argument("ball_average_projection: scale index < 1");
  if (f.size() != s.n)
    throw std::invalid_argument("ball_average_projection: value vector size mismatch");
  const double r = 1.0 / n_scale;
  const std::vector<int> net = epsilon_net(s, r);
  const PartitionFamily fam = partition_of_unity(s, net, r);
  Vector out = Vector::Zero(s.n);
  for (std::size_t zi = 0; zi < net.size(); ++zi) {
    const std::vector<double> dist = s.row(net[zi]);
    double mass = 0.0, acc = 0.0;
    for (int v = 0; v < s.n; ++v) {
      if (dist[static_cast<std::size_t>(v)] < r) {
        const double mv = s.measure.mass[static_cast<std::size_t>(v)];
        mass += mv;
        acc += mv * f[v];
      }
    }
    if (!(mass > 0.0)) throw std::runtime_error("ball_average_projection: empty ball");
    out += (acc / mass) * fam.phi[zi];
  }
  return out;
}

namespace {

Vector nonneg_dyadic_approx(const QuadraticForm& form, const Vector& f, int n) {
  const double scale = std::pow(2.0, n);
  std::vector<long long> bin(static_cast<std::size_t>(form.n));
  for (int v = 0; v < form.n; ++v)
    bin[static_cast<std::size_t>(v)] = static_cast<long long>(std::floor(f[v] * scale));

  std::vector<bool> pin(static_cast<std::size_t>(form.n), false);
  for (int col = 0; col < form.A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(form.A, col); it; ++it) {
      if (it.row() >= it.col()) continue;
      if (bin[static_cast<std::size_t>(it.row())] != bin[static_cast<std::size_t>(it.col())]) {
        pin[static_cast<std::size_t>(it.row())] = true;
        pin[static_cast<std::size_t>(it.col())] = true;
      }
    }
  }
  std::vector<int> pinned;
  std::vector<double> values;
  for (int v = 0; v < form.n; ++v) {
    if (pin[static_cast<std::size_t>(v)]) {
      pinned.push_back(v);
      values.push_back(f[v]);
    }
  }
  if (pinned.empty()) {
    // no bin is ever crossed, so f moves by less than one bin width globally
    return Vector::Constant(form.n, f.mean());
  }
  return dirichlet_solve(form, pinned, values);
}

} // namespace

Vector piecewise_harmonic_approx(const QuadraticForm& form, const Vector& f, int n,
                                 bool split_negative) {
  if (n < 0) throw std::invalid_argument("piecewise_harmonic_approx: negative resolution");
  if (f.size() != form.n)
    throw std::invalid_argument("piecewise_harmonic_approx: value vector size mismatch");
  if (f.minCoeff() >= 0.0) return nonneg_dyadic_approx(form, f, n);
  if (!split_negative)
    throw std::invalid_argument(
        "piecewise_harmonic_approx: negative input requires split_negative");
  const Vector fp = f.cwiseMax(0.0);
  const Vector fm = (-f).cwiseMax(0.0);
  return nonneg_dyadic_approx(form, fp, n) - nonneg_dyadic_approx(form, fm, n);
}

double reverse_poincare_check(const QuadraticForm& form, const FiniteMetricSpace& s,
                              const ScalingProfile& profile, const Vector& h, int x, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("reverse_poincare_check: r must be positive");
  if (h.size() != s.n || form.n != s.n)
    throw std::invalid_argument("reverse_poincare_check: size mismatch");
  const VertexMeasure gamma = vertex_energy_measure(form, h);
  const std::vector<double> dist = s.row(x);

  double num = 0.0;
  for (int v = 0; v < s.n; ++v)
    if (dist[static_cast<std::size_t>(v)] < r) num += gamma.mass[static_cast<std::size_t>(v)];
  num *= profile.psi(r);

  double ann_mass = 0.0, ann_mean = 0.0;
  for (int v = 0; v < s.n; ++v) {
    const double dv = dist[static_cast<std::size_t>(v)];
    if (dv >= r && dv < 2.0 * r) {
      const double mv = s.measure.mass[static_cast<std::size_t>(v)];
      ann_mass += mv;
      ann_mean += mv * h[v];
    }
  }
  if (!(ann_mass > 0.0))
    throw std::runtime_error("reverse_poincare_check: annulus has zero mass");
  ann_mean /= ann_mass;
  double den = 0.0;
  for (int v = 0; v < s.n; ++v) {
    const double dv = dist[static_cast<std::size_t>(v)];
    if (dv >= r && dv < 2.0 * r) {
      const double diff = h[v] - ann_mean;
      den += s.measure.mass[static_cast<std::size_t>(v)] * diff * diff;
    }
  }
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

} // namespace gasketlab

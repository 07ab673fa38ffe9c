// forms.hpp -- Dirichlet energies on gasket graphs.
//
// The base form on a simplex is E0(f) = sum_{j<k} (f_j - f_k)^2. The depth-n
// form is (1/R_n) * sum over cells of E0 restricted to the cell, with
// R_n = r_{l_1}*...*r_{l_n}. The per-level factor r_l is certified exactly by
// a rational Schur complement of the unscaled level-1 network onto the
// corners, which must come out proportional to the base form.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

#include "gasketlab/geometry.hpp"
#include "gasketlab/measures.hpp"
#include "gasketlab/rational.hpp"

namespace gasketlab {

using Vector = Eigen::VectorXd;

struct QuadraticForm {
  int n = 0;
  Eigen::SparseMatrix<double> A;   // symmetric, zero row sums, PSD

  double energy(const Vector& f) const;
  double energy(const Vector& f, const Vector& g) const;
  double conductance(int u, int v) const;           // -A(u,v), 0 when absent
  std::vector<double> vertex_conductance() const;   // diagonal of A
};

QuadraticForm base_form(int N);

struct ScaledFormParams {
  GasketSpec spec;
  std::vector<Rational> r_level;   // r_{l_k}, exact, one per level
  std::vector<Rational> R;         // R_0..R_{n_max}, R_0 = 1
  std::vector<WideInt> M;          // M_0..M_{n_max}, M_0 = 1
  std::vector<Rational> T;         // T_k = M_k / R_k

  double R_at(int k) const { return to_double(R.at(k)); }
  double T_at(int k) const { return to_double(T.at(k)); }

  static ScaledFormParams make(const GasketSpec& spec);
};

QuadraticForm assemble_form(const GasketGraph& g, const ScaledFormParams& params);

// Schur complement onto the given vertices (output indexed in that order).
// The energy of the traced form at boundary data equals the minimum of the
// input energy over all extensions of that data.
QuadraticForm trace_form(const QuadraticForm& form, const std::vector<int>& boundary);

// Exact per-level resistance factor: the trace of the unscaled level-1 sum
// form onto the simplex corners equals r_l * base_form(N). Throws if the
// trace fails to be an exact scalar multiple, or if r_l is outside (0,1).
Rational resistance_scale(int N, int l);

// Energy minimizer with the given boundary data; interior residual zero.
Vector dirichlet_solve(const QuadraticForm& form, const std::vector<int>& boundary,
                       const std::vector<double>& values);

// One-level harmonic extension: values on V_{n-1} to values on V_n with the
// same energy. Cell-local, using a cached exact extension matrix per level.
Vector harmonic_extend(const GasketGraph& prev, const GasketGraph& next, const Vector& f);

// Per-cell energy measure: mass of cell w is (1/R_n) * E0(f on w).
CellMeasure cell_energy_measure(const GasketGraph& g, const ScaledFormParams& params,
                                const Vector& f);

// Per-vertex energy measure: Gamma(v) = (1/2) sum_u c(u,v) (f(u)-f(v))^2.
// Satisfies sum_v g(v) Gamma(v) = E(f, f*g) - (1/2) E(f^2, g) for every g.
VertexMeasure vertex_energy_measure(const QuadraticForm& form, const Vector& f);

} // namespace gasketlab

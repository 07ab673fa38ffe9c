#include "gasketlab/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "gasketlab/approximation.hpp"
#include "gasketlab/chainmetric.hpp"
#include "gasketlab/diagnostics.hpp"
#include "gasketlab/forms.hpp"
#include "gasketlab/measures.hpp"
#include "gasketlab/rng.hpp"
#include "gasketlab/scaling.hpp"
#include "gasketlab/stochastic.hpp"

namespace gasketlab {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

void write_text(const std::string& dir, const std::string& name, const std::string& body) {
  std::ofstream out = open_out(dir, name);
  out << body;
}

void add_manifest_entry(json& manifest, const std::string& path, const std::string& x,
                        const std::string& y, const std::string& scale,
                        const std::vector<double>& reference_slopes) {
  json entry;
  entry["path"] = path;
  entry["x"] = x;
  entry["y"] = y;
  entry["scale"] = scale;
  entry["reference_slopes"] = reference_slopes;
  manifest["files"].push_back(entry);
}

int effective_depth(const ExperimentConfig& cfg) {
  const int schedule = static_cast<int>(cfg.spec.levels.size());
  const int d = cfg.depth == 0 ? schedule : cfg.depth;
  if (d < 1 || d > schedule)
    throw ConfigError("depth must lie within the level schedule");
  return d;
}

json base_summary(const ExperimentConfig& cfg, int depth) {
  json j;
  j["schema_version"] = "1.0";
  j["kind"] = cfg.kind;
  j["dimension"] = cfg.spec.dimension;
  j["levels"] = cfg.spec.levels;
  j["depth"] = depth;
  j["seed"] = cfg.seed;
  return j;
}

// harmonic function with corner data (1, 0, ..., 0) carried through every
// refinement level
struct HarmonicChain {
  ScaledFormParams params;
  std::vector<GasketGraph> graphs;   // depths 0..n
  std::vector<Vector> values;
};

HarmonicChain make_harmonic_chain(const GasketSpec& spec, int depth) {
  HarmonicChain chain;
  chain.params = ScaledFormParams::make(spec);
  chain.graphs.reserve(static_cast<std::size_t>(depth) + 1);
  chain.values.reserve(static_cast<std::size_t>(depth) + 1);
  chain.graphs.push_back(build_graph(spec, 0));
  Vector f0 = Vector::Zero(chain.graphs[0].vertex_count());
  f0[chain.graphs[0].boundary[0]] = 1.0;
  chain.values.push_back(f0);
  for (int k = 1; k <= depth; ++k) {
    chain.graphs.push_back(build_graph(spec, k));
    chain.values.push_back(
        harmonic_extend(chain.graphs[static_cast<std::size_t>(k) - 1],
                        chain.graphs[static_cast<std::size_t>(k)],
                        chain.values[static_cast<std::size_t>(k) - 1]));
  }
  return chain;
}

std::vector<int> seeded_sources(int n, int count, std::uint64_t seed) {
  std::vector<int> out;
  std::set<int> used;
  std::uint64_t i = 0;
  while (static_cast<int>(out.size()) < count && i < 1000) {
    SplitMix64 rng = stream_rng(seed, i++);
    const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (used.insert(v).second) out.push_back(v);
  }
  return out;
}

bool is_connected(const GasketGraph& g) {
  if (g.vertex_count() == 0) return false;
  std::vector<double> d = graph_distances_from(g, 0);
  for (double v : d)
    if (!std::isfinite(v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

ExperimentResult run_build(const ExperimentConfig& cfg) {
  const int depth = effective_depth(cfg);
  const GasketGraph g = build_graph(cfg.spec, depth);
  const ScaledFormParams params = ScaledFormParams::make(cfg.spec);

  ExperimentResult res;
  res.summary = base_summary(cfg, depth);
  res.summary["vertex_count"] = g.vertex_count();
  res.summary["cell_count"] = static_cast<int>(g.cells.size());
  res.summary["edge_count"] = static_cast<int>(g.edges.size());
  res.summary["denominator"] = g.denominator.str();
  res.summary["edge_length"] = g.edge_length;

  const bool cells_ok =
      WideInt(static_cast<int>(g.cells.size())) == params.M[static_cast<std::size_t>(depth)];
  const bool connected = is_connected(g);
  res.summary["checks"]["cell_count_matches_product"] = cells_ok;
  res.summary["checks"]["connected"] = connected;
  res.summary["checks"]["boundary_size"] = static_cast<int>(g.boundary.size());
  res.ok = cells_ok && connected &&
           static_cast<int>(g.boundary.size()) == cfg.spec.dimension + 1;

  if (!cfg.out_dir.empty()) {
    const std::vector<std::vector<double>> coords = embed_vertices(g);
    std::ofstream vf = open_out(cfg.out_dir, "vertices.csv");
    vf << "id";
    for (int d = 0; d < cfg.spec.dimension; ++d) vf << ",key" << d;
    for (int d = 0; d < cfg.spec.dimension; ++d) vf << ",x" << d;
    vf << "\n";
    for (int v = 0; v < g.vertex_count(); ++v) {
      vf << v;
      for (const WideInt& a : g.vertices[static_cast<std::size_t>(v)].a) vf << "," << a.str();
      for (double c : coords[static_cast<std::size_t>(v)]) vf << "," << fmt(c);
      vf << "\n";
    }
    std::ofstream cf = open_out(cfg.out_dir, "cells.csv");
    cf << "index,word";
    for (int j = 0; j <= cfg.spec.dimension; ++j) cf << ",v" << j;
    cf << "\n";
    for (std::size_t w = 0; w < g.cells.size(); ++w) {
      cf << w << "," << g.cells[w].word.to_string();
      for (int v : g.cells[w].v) cf << "," << v;
      cf << "\n";
    }
    std::ofstream ef = open_out(cfg.out_dir, "edges.csv");
    ef << "u,v,multiplicity\n";
    for (const Edge& e : g.edges) ef << e.u << "," << e.v << "," << e.multiplicity << "\n";
    write_text(cfg.out_dir, "summary.json", res.summary.dump(2) + "\n");
  }
  return res;
}

// ---------------------------------------------------------------------------
// scale
// ---------------------------------------------------------------------------

ExperimentResult run_scale(const ExperimentConfig& cfg) {
  const int depth = effective_depth(cfg);
  GasketSpec spec = cfg.spec;
  spec.levels.resize(static_cast<std::size_t>(depth));
  const ScalingProfile profile = ScalingProfile::make(spec);

  ExperimentResult res;
  res.summary = base_summary(cfg, depth);

  json levels_json = json::array();
  for (int k = 0; k < depth; ++k) {
    const int l = spec.levels[static_cast<std::size_t>(k)];
    const Rational r = resistance_scale(spec.dimension, l);
    json row;
    row["level"] = l;
    row["cells"] = s_count(l, spec.dimension).str();
    row["r"] = to_double(r);
    row["r_exact"] = r.str();
    row["beta"] = profile.beta[static_cast<std::size_t>(k)];
    levels_json.push_back(row);
  }
  res.summary["levels_table"] = levels_json;
  res.summary["beta_min"] = profile.beta_min;
  res.summary["beta_max"] = profile.beta_max;

  // breakpoint continuity, evaluating both branch formulas directly
  double continuity = 0.0;
  for (int n = 1; n <= depth; ++n) {
    const double s = 1.0 / profile.L[static_cast<std::size_t>(n) - 1];
    const double from_branch_n =
        std::pow(profile.L[static_cast<std::size_t>(n)] * s,
                 profile.beta[static_cast<std::size_t>(n) - 1]) /
        profile.T[static_cast<std::size_t>(n)];
    const double upper = n == 1 ? std::pow(s, profile.beta_min)
                                : std::pow(profile.L[static_cast<std::size_t>(n) - 1] * s,
                                           profile.beta[static_cast<std::size_t>(n) - 2]) /
                                      profile.T[static_cast<std::size_t>(n) - 1];
    continuity = std::max(continuity, std::abs(from_branch_n - upper) / std::abs(upper));
  }
  res.summary["breakpoint_residual"] = continuity;

  // numeric Phi against the power-law closed form
  double phi_err = 0.0;
  for (int i = 1; i <= 5; ++i) {
    for (int j = 1; j <= 5; ++j) {
      const double R = 0.4 * i, t = 0.2 * j;
      const double numeric =
          phi_eval([&](double r) { return std::pow(r, profile.beta_min); }, R, t);
      phi_err = std::max(phi_err, std::abs(numeric - phi_power_law(profile.beta_min, R, t)) /
                                      std::max(1.0, phi_power_law(profile.beta_min, R, t)));
    }
  }
  res.summary["phi_power_law_residual"] = phi_err;

  std::vector<double> grid;
  for (int k = 0; k <= 14; ++k) grid.push_back(std::pow(2.0, -k));
  const RegularityEstimate reg = verify_regularity(profile, grid);
  res.summary["regularity"] = {{"beta0", reg.beta0}, {"beta1", reg.beta1}, {"c_psi", reg.c_psi}};

  const RegimeReport regime = classify_regime(profile);
  res.summary["regime"] = {{"tag", regime_name(regime.tag)},
                           {"decay_exponent", regime.decay_exponent},
                           {"min_quantity", regime.min_quantity},
                           {"psi_over_r2_slope", regime.psi_over_r2_slope},
                           {"psi_over_r2_floor", regime.psi_over_r2_floor}};

  const bool reg_ok = reg.beta0 >= profile.beta_min - 1e-9 &&
                      reg.beta1 <= profile.beta_max + 1e-9;
  res.summary["checks"]["breakpoints_continuous"] = continuity < 1e-12;
  res.summary["checks"]["phi_matches_closed_form"] = phi_err < 1e-8;
  res.summary["checks"]["regularity_within_band"] = reg_ok;
  res.summary["checks"]["regime_singular"] = regime.tag == Regime::singular;
  res.ok = continuity < 1e-12 && phi_err < 1e-8 && reg_ok && regime.tag == Regime::singular;

  if (!cfg.out_dir.empty()) {
    std::ofstream sf = open_out(cfg.out_dir, "scale.csv");
    sf << "level,cells,r,beta\n";
    for (const auto& row : levels_json)
      sf << row["level"].get<int>() << "," << row["cells"].get<std::string>() << ","
         << fmt(row["r"].get<double>()) << "," << fmt(row["beta"].get<double>()) << "\n";

    std::ofstream pf = open_out(cfg.out_dir, "psi_table.csv");
    pf << "s,psi\n";
    const double s_lo = 0.5 / profile.L[static_cast<std::size_t>(depth)];
    for (int i = 0; i <= 60; ++i) {
      const double s = s_lo * std::pow(4.0 / s_lo, i / 60.0);
      pf << fmt(s) << "," << fmt(profile.psi(s)) << "\n";
    }

    std::ofstream ff = open_out(cfg.out_dir, "phi_table.csv");
    ff << "R,t,phi\n";
    for (int i = 1; i <= 8; ++i)
      for (int j = 1; j <= 8; ++j) {
        const double R = 0.25 * i, t = 0.125 * j;
        ff << fmt(R) << "," << fmt(t) << "," << fmt(phi_eval(profile, R, t)) << "\n";
      }

    json manifest;
    manifest["files"] = json::array();
    add_manifest_entry(manifest, "psi_table.csv", "s", "psi", "log-log",
                       {profile.beta_min, profile.beta_max, 2.0});
    add_manifest_entry(manifest, "phi_table.csv", "R", "phi", "linear", {});
    write_text(cfg.out_dir, "manifest.json", manifest.dump(2) + "\n");
    write_text(cfg.out_dir, "summary.json", res.summary.dump(2) + "\n");
  }
  return res;
}

// ---------------------------------------------------------------------------
// harmonic
// ---------------------------------------------------------------------------

ExperimentResult run_harmonic(const ExperimentConfig& cfg) {
  const int depth = effective_depth(cfg);
  const HarmonicChain chain = make_harmonic_chain(cfg.spec, depth);

  ExperimentResult res;
  res.summary = base_summary(cfg, depth);

  std::vector<double> energies;
  for (int k = 0; k <= depth; ++k) {
    const QuadraticForm form =
        assemble_form(chain.graphs[static_cast<std::size_t>(k)], chain.params);
    energies.push_back(form.energy(chain.values[static_cast<std::size_t>(k)]));
  }
  double drift = 0.0;
  for (double e : energies) drift = std::max(drift, std::abs(e - energies[0]));
  res.summary["energies"] = energies;
  res.summary["energy_drift"] = drift;

  const GasketGraph& g = chain.graphs.back();
  const Vector& h = chain.values.back();
  const QuadraticForm form = assemble_form(g, chain.params);
  const CellMeasure gamma = cell_energy_measure(g, chain.params, h);
  const double total_gap = std::abs(gamma.total() - form.energy(h));
  res.summary["cell_energy_total_gap"] = total_gap;

  res.summary["checks"]["energy_constant"] = drift < 1e-9;
  res.summary["checks"]["cell_total_matches_energy"] = total_gap < 1e-10;
  res.ok = drift < 1e-9 && total_gap < 1e-10;

  if (!cfg.out_dir.empty()) {
    const std::vector<std::vector<double>> coords = embed_vertices(g);
    std::ofstream sf = open_out(cfg.out_dir, "solution.csv");
    sf << "id";
    for (int d = 0; d < cfg.spec.dimension; ++d) sf << ",x" << d;
    sf << ",value\n";
    for (int v = 0; v < g.vertex_count(); ++v) {
      sf << v;
      for (double c : coords[static_cast<std::size_t>(v)]) sf << "," << fmt(c);
      sf << "," << fmt(h[v]) << "\n";
    }
    std::ofstream cf = open_out(cfg.out_dir, "cell_energy.csv");
    cf << "index,word,mass\n";
    for (std::size_t w = 0; w < g.cells.size(); ++w)
      cf << w << "," << g.cells[w].word.to_string() << "," << fmt(gamma.mass[w]) << "\n";
    write_text(cfg.out_dir, "summary.json", res.summary.dump(2) + "\n");
  }
  return res;
}

// ---------------------------------------------------------------------------
// singularity
// ---------------------------------------------------------------------------

ExperimentResult run_singularity(const ExperimentConfig& cfg) {
  const int depth = effective_depth(cfg);
  const HarmonicChain chain = make_harmonic_chain(cfg.spec, depth);
  constexpr double kDelta = 0.01;

  ExperimentResult res;
  res.summary = base_summary(cfg, depth);

  std::vector<double> minimal, entropy;
  ConcentrationProfile deepest;
  for (int k = 1; k <= depth; ++k) {
    const GasketGraph& g = chain.graphs[static_cast<std::size_t>(k)];
    const CellMeasure gamma =
        cell_energy_measure(g, chain.params, chain.values[static_cast<std::size_t>(k)]);
    const CellMeasure m = uniform_cell_measure(g);
    ConcentrationProfile prof = concentration_profile(gamma, m, kDelta);
    minimal.push_back(prof.minimal_mass);
    entropy.push_back(prof.entropy_rate);
    if (k == depth) deepest = std::move(prof);
  }
  res.summary["delta"] = kDelta;
  res.summary["minimal_mass"] = minimal;
  res.summary["entropy_rate"] = entropy;

  bool decreasing = true, nondecreasing = true;
  for (std::size_t i = 1; i < minimal.size(); ++i) {
    decreasing = decreasing && minimal[i] < minimal[i - 1];
    nondecreasing = nondecreasing && entropy[i] >= entropy[i - 1] - 1e-12;
  }
  // identical measures must read off exactly 1 - delta
  const CellMeasure m1 = uniform_cell_measure(chain.graphs[1]);
  const double self_mass = concentration_profile(m1, m1, kDelta).minimal_mass;
  const bool self_ok = std::abs(self_mass - (1.0 - kDelta)) < 1e-12;

  res.summary["checks"]["minimal_mass_strictly_decreasing"] = decreasing;
  res.summary["checks"]["entropy_rate_nondecreasing"] = nondecreasing;
  res.summary["checks"]["identity_profile_reads_one_minus_delta"] = self_ok;
  res.ok = decreasing && nondecreasing && self_ok;

  if (!cfg.out_dir.empty()) {
    std::ofstream lf = open_out(cfg.out_dir, "lorenz.csv");
    lf << "cum_m,cum_gamma\n";
    for (std::size_t i = 0; i < deepest.lorenz_m.size(); ++i)
      lf << fmt(deepest.lorenz_m[i]) << "," << fmt(deepest.lorenz_g[i]) << "\n";
    std::ofstream pf = open_out(cfg.out_dir, "profile.csv");
    pf << "depth,minimal_mass,entropy_rate\n";
    for (std::size_t i = 0; i < minimal.size(); ++i)
      pf << (i + 1) << "," << fmt(minimal[i]) << "," << fmt(entropy[i]) << "\n";
    json manifest;
    manifest["files"] = json::array();
    add_manifest_entry(manifest, "profile.csv", "depth", "entropy_rate", "linear", {});
    add_manifest_entry(manifest, "lorenz.csv", "cum_m", "cum_gamma", "linear", {1.0});
    write_text(cfg.out_dir, "manifest.json", manifest.dump(2) + "\n");
    write_text(cfg.out_dir, "summary.json", res.summary.dump(2) + "\n");
  }
  return res;
}

// ---------------------------------------------------------------------------
// walk
// ---------------------------------------------------------------------------

ExperimentResult run_walk(const ExperimentConfig& cfg) {
  const int depth = effective_depth(cfg);
  const int d_lo = std::min(3, depth);
  const ScaledFormParams params = ScaledFormParams::make(cfg.spec);
  const ScalingProfile profile = ScalingProfile::make(cfg.spec);

  ExperimentResult res;
  res.summary = base_summary(cfg, depth);

  struct Row {
    int depth;
    double r, steps, t;
  };
  std::vector<Row> rows;
  json mc_json;
  bool mc_ok = true, monotone_ok = true;

  for (int n = d_lo; n <= depth; ++n) {
    const GasketGraph g = build_graph(cfg.spec, n);
    const QuadraticForm form = assemble_form(g, params);
    const WalkOperator walk = build_walk(form, 0.0);
    const CellMeasure cm = uniform_cell_measure(g);
    const FiniteMetricSpace space =
        FiniteMetricSpace::from_graph(g, vertex_measure_from_cells(g, cm));
    const double Ln = to_double(Rational(g.denominator));
    const double Tn = params.T_at(n);
    double prev_tau = 0.0;
    for (double mult : {2.0, 4.0}) {
      const double r = mult / Ln;
      const std::vector<int> ball = space.ball(g.boundary[0], r);
      if (static_cast<int>(ball.size()) >= g.vertex_count()) continue;
      const double steps = exit_time_exact(walk, ball, g.boundary[0]);
      monotone_ok = monotone_ok && steps > prev_tau;
      prev_tau = steps;
      rows.push_back({n, r, steps, steps / Tn});
      if (n == d_lo && mult == 4.0) {
        const McStats mc = walk_montecarlo_exit(walk, g.boundary[0], ball, 20000, cfg.seed);
        const double sigma = std::max(mc.stderr_mean, 1e-12);
        mc_ok = std::abs(mc.mean - steps) <= 3.0 * sigma;
        mc_json = {{"depth", n},       {"r", r},
                   {"exact", steps},   {"mc_mean", mc.mean},
                   {"mc_stderr", mc.stderr_mean}, {"trials", mc.trials}};
      }
    }
  }

  double slope = 0.0;
  if (rows.size() >= 2) {
    std::vector<double> xs, ys;
    for (const Row& row : rows) {
      xs.push_back(std::log(row.r));
      ys.push_back(std::log(row.t));
    }
    const double nr = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    slope = (nr * sxy - sx * sy) / (nr * sxx - sx * sx);
  }
  res.summary["slope"] = slope;
  res.summary["beta_min"] = profile.beta_min;
  res.summary["beta_max"] = profile.beta_max;
  res.summary["montecarlo"] = mc_json;

  const bool slope_ok = slope >= profile.beta_min - 0.2 && slope <= profile.beta_max + 0.2;
  res.summary["checks"]["slope_within_band"] = slope_ok;
  res.summary["checks"]["montecarlo_within_3_sigma"] = mc_ok;
  res.summary["checks"]["exit_time_monotone_in_radius"] = monotone_ok;
  res.ok = slope_ok && mc_ok && monotone_ok;

  if (!cfg.out_dir.empty()) {
    std::ofstream ef = open_out(cfg.out_dir, "exit.csv");
    ef << "depth,r,steps,t\n";
    for (const Row& row : rows)
      ef << row.depth << "," << fmt(row.r) << "," << fmt(row.steps) << "," << fmt(row.t)
         << "\n";
    json manifest;
    manifest["files"] = json::array();
    add_manifest_entry(manifest, "exit.csv", "r", "t", "log-log",
                       {profile.beta_min, 2.0});
    write_text(cfg.out_dir, "manifest.json", manifest.dump(2) + "\n");
    write_text(cfg.out_dir, "summary.json", res.summary.dump(2) + "\n");
  }
  return res;
}

// ---------------------------------------------------------------------------
// metric
// ---------------------------------------------------------------------------

ExperimentResult run_metric(const ExperimentConfig& cfg) {
  const int depth = std::min(effective_depth(cfg), 5);
  const GasketGraph g = build_graph(cfg.spec, depth);
  const CellMeasure cm = uniform_cell_measure(g);
  const FiniteMetricSpace space =
      FiniteMetricSpace::from_graph(g, vertex_measure_from_cells(g, cm));

  ExperimentResult res;
  res.summary = base_summary(cfg, depth);

  const double el = g.edge_length;
  const std::vector<double> eps_list = {4.0 * el, 16.0 * el, 0.25};
  const double cc = chain_constant(space, eps_list, cfg.seed);
  res.summary["chain_constant"] = cc;

  // midpoint bounds on seeded pairs; the scale never drops below two graph
  // edges, otherwise strict-< hops cannot exist at shallow depths
  const double eps = std::max(0.125, 2.0 * el);
  int violations = 0;
  double worst_slack = 0.0;
  json pairs_json = json::array();
  std::vector<std::array<int, 2>> pairs;
  for (std::uint64_t i = 0; pairs.size() < 200 && i < 4000; ++i) {
    SplitMix64 rng = stream_rng(cfg.seed, i);
    const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(space.n)));
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(space.n)));
    if (x != y) pairs.push_back({x, y});
  }
  std::ostringstream chain_csv;
  chain_csv << "x,y,eps,d,d_eps,z,gap_x,gap_y\n";
  for (const auto& [x, y] : pairs) {
    const std::vector<double> dx = chain_metric_from(space, eps, x);
    const double dxy = dx[static_cast<std::size_t>(y)];
    const int z = chain_midpoint(space, eps, x, y);
    const double dxz = dx[static_cast<std::size_t>(z)];
    const double dzy = chain_metric(space, eps, z, y);
    const double gap_x = std::abs(2.0 * dxz - dxy);
    const double gap_y = std::abs(2.0 * dzy - dxy);
    if (gap_x > 5.0 * eps + 1e-12 || gap_y > 5.0 * eps + 1e-12) ++violations;
    worst_slack = std::max(worst_slack, std::max(gap_x, gap_y));
    chain_csv << x << "," << y << "," << fmt(eps) << "," << fmt(space.d(x, y)) << ","
              << fmt(dxy) << "," << z << "," << fmt(gap_x) << "," << fmt(gap_y) << "\n";
  }
  res.summary["midpoint"] = {{"eps", eps},
                             {"pairs", static_cast<int>(pairs.size())},
                             {"violations", violations},
                             {"worst_gap", worst_slack},
                             {"bound", 5.0 * eps}};

  // nets and coverage
  json nets_json = json::array();
  bool nets_ok = true;
  for (double ne : {0.25, 0.125, 0.0625}) {
    const std::vector<int> net = epsilon_net(space, ne);
    const std::vector<int> again = epsilon_net(space, ne);
    double worst_cover = 0.0;
    std::vector<double> mind(static_cast<std::size_t>(space.n),
                             std::numeric_limits<double>::infinity());
    for (int z : net) {
      const std::vector<double> dz = space.row(z);
      for (int v = 0; v < space.n; ++v)
        mind[static_cast<std::size_t>(v)] =
            std::min(mind[static_cast<std::size_t>(v)], dz[static_cast<std::size_t>(v)]);
    }
    for (double v : mind) worst_cover = std::max(worst_cover, v);
    nets_ok = nets_ok && net == again && worst_cover < ne;
    nets_json.push_back({{"eps", ne},
                         {"size", static_cast<int>(net.size())},
                         {"max_gap", worst_cover}});
  }
  res.summary["nets"] = nets_json;

  // straight-line comparison on a shallow embedding
  double cc_euclid = 0.0;
  {
    const int d_e = std::min(depth, 4);
    const GasketGraph ge = build_graph(cfg.spec, d_e);
    const CellMeasure cme = uniform_cell_measure(ge);
    const FiniteMetricSpace se = FiniteMetricSpace::from_points(
        embed_vertices(ge), vertex_measure_from_cells(ge, cme));
    cc_euclid = chain_constant(se, {0.1}, cfg.seed);
  }
  res.summary["straight_line_chain_constant"] = cc_euclid;

  const bool cc_ok = std::abs(cc - 1.0) < 1e-12;
  res.summary["checks"]["graph_chain_constant_is_one"] = cc_ok;
  res.summary["checks"]["midpoint_bounds_hold"] = violations == 0;
  res.summary["checks"]["nets_deterministic_and_covering"] = nets_ok;
  res.summary["checks"]["straight_line_constant_exceeds_one"] = cc_euclid > 1.0;
  res.ok = cc_ok && violations == 0 && nets_ok && cc_euclid > 1.0;

  if (!cfg.out_dir.empty()) {
    write_text(cfg.out_dir, "chain.csv", chain_csv.str());
    std::ostringstream nf;
    nf << "eps,size,max_gap\n";
    for (const auto& row : nets_json)
      nf << fmt(row["eps"].get<double>()) << "," << row["size"].get<int>() << ","
         << fmt(row["max_gap"].get<double>()) << "\n";
    write_text(cfg.out_dir, "nets.csv", nf.str());
    write_text(cfg.out_dir, "summary.json", res.summary.dump(2) + "\n");
  }
  return res;
}

// ---------------------------------------------------------------------------
// approx
// ---------------------------------------------------------------------------

ExperimentResult run_approx(const ExperimentConfig& cfg) {
  const int depth = std::min(effective_depth(cfg), 5);
  GasketSpec spec = cfg.spec;
  const HarmonicChain chain = make_harmonic_chain(spec, depth);
  const GasketGraph& g = chain.graphs.back();
  const Vector& h = chain.values.back();
  const QuadraticForm form = assemble_form(g, chain.params);
  const CellMeasure cm = uniform_cell_measure(g);
  const FiniteMetricSpace space =
      FiniteMetricSpace::from_graph(g, vertex_measure_from_cells(g, cm));
  const ScalingProfile profile = ScalingProfile::make(spec);

  ExperimentResult res;
  res.summary = base_summary(cfg, depth);

  // partition constants across halving scales
  json part_json = json::array();
  std::vector<double> c_lip, c_en, c_den;
  bool partition_ok = true;
  for (double eps : {0.25, 0.125, 0.0625}) {
    const std::vector<int> net = epsilon_net(space, eps);
    const PartitionFamily fam = partition_of_unity(space, net, eps);
    const Vector total = fam.sum();
    double sum_err = 0.0;
    for (int v = 0; v < space.n; ++v) sum_err = std::max(sum_err, std::abs(total[v] - 1.0));
    // Lipschitz constant over edges, support check, energies
    double lip = 0.0, en = 0.0, support_err = 0.0;
    Vector density_num = Vector::Zero(space.n);
    for (std::size_t zi = 0; zi < fam.net.size(); ++zi) {
      const Vector& p = fam.phi[zi];
      for (const Edge& e : g.edges) {
        lip = std::max(lip, std::abs(p[e.u] - p[e.v]) / g.edge_length);
      }
      const std::vector<double> dz = space.row(fam.net[zi]);
      for (int v = 0; v < space.n; ++v)
        if (dz[static_cast<std::size_t>(v)] >= 2.0 * eps)
          support_err = std::max(support_err, std::abs(p[v]));
      const double ball = space.ball_mass(fam.net[zi], eps);
      en = std::max(en, eps * eps * form.energy(p) / ball);
      const VertexMeasure gm = vertex_energy_measure(form, p);
      for (int v = 0; v < space.n; ++v) density_num[v] += gm.mass[static_cast<std::size_t>(v)];
    }
    double den = 0.0;
    for (int v = 0; v < space.n; ++v)
      den = std::max(den, eps * eps * density_num[v] /
                              space.measure.mass[static_cast<std::size_t>(v)]);
    partition_ok = partition_ok && sum_err < 1e-12 && support_err == 0.0;
    c_lip.push_back(eps * lip);
    c_en.push_back(en);
    c_den.push_back(den);
    part_json.push_back({{"eps", eps},
                         {"net_size", static_cast<int>(net.size())},
                         {"sum_error", sum_err},
                         {"c_lip", eps * lip},
                         {"c_energy", en},
                         {"c_density", den}});
  }
  bool stable = true;
  for (std::size_t i = 1; i < c_lip.size(); ++i) {
    const auto within2 = [](double a, double b) {
      return a <= 2.0 * b + 1e-12 && b <= 2.0 * a + 1e-12;
    };
    stable = stable && within2(c_lip[i], c_lip[i - 1]) && within2(c_en[i], c_en[i - 1]) &&
             within2(c_den[i], c_den[i - 1]);
  }
  res.summary["partition"] = part_json;

  // piecewise-harmonic approximation on harmonic and tent inputs
  json ph_json = json::array();
  bool ph_ok = true;
  const Vector tent = tent_function(space, g.boundary[0], 0.5);
  for (const auto& [name, f] : std::vector<std::pair<std::string, Vector>>{
           {"harmonic", h}, {"tent", tent}}) {
    const double ef = form.energy(f);
    double prev_energy = -1.0;
    for (int n = 1; n <= 6; ++n) {
      const Vector fn = piecewise_harmonic_approx(form, f, n);
      const double sup = (f - fn).cwiseAbs().maxCoeff();
      const double en = form.energy(fn);
      const bool sup_ok = sup <= std::pow(2.0, -n) + 1e-12;
      const bool mono_ok = en >= prev_energy - 1e-10 && en <= ef + 1e-10;
      ph_ok = ph_ok && sup_ok && mono_ok;
      prev_energy = en;
      ph_json.push_back({{"input", name},
                         {"n", n},
                         {"sup_error", sup},
                         {"energy", en},
                         {"input_energy", ef}});
    }
  }
  res.summary["piecewise_harmonic"] = ph_json;

  // ball-average projection: constants and modulus bound
  json ba_json = json::array();
  bool ba_ok = true;
  for (int n : {4, 8, 16}) {
    const Vector fn = ball_average_projection(space, h, n);
    const double sup = (fn - h).cwiseAbs().maxCoeff();
    // modulus of continuity of h at radius 3/n by exhaustive scan
    double modulus = 0.0;
    for (int x = 0; x < space.n; ++x) {
      const std::vector<double> dx = space.row(x);
      for (int y = 0; y < space.n; ++y)
        if (dx[static_cast<std::size_t>(y)] <= 3.0 / n)
          modulus = std::max(modulus, std::abs(h[x] - h[y]));
    }
    const double ratio = form.energy(fn) / form.energy(h);
    ba_ok = ba_ok && sup <= modulus + 1e-12;
    ba_json.push_back(
        {{"n", n}, {"sup_error", sup}, {"modulus_3_over_n", modulus}, {"energy_ratio", ratio}});
  }
  const Vector const_f = Vector::Constant(space.n, 0.7);
  const double const_err =
      (ball_average_projection(space, const_f, 8) - const_f).cwiseAbs().maxCoeff();
  ba_ok = ba_ok && const_err < 1e-12;
  res.summary["ball_average"] = ba_json;
  res.summary["ball_average_constant_error"] = const_err;

  // reverse Poincare ratios at seeded centers
  json rp_json = json::array();
  double rp_max = 0.0;
  bool rp_ok = true;
  for (int c : seeded_sources(space.n, 20, cfg.seed + 7)) {
    const double ratio = reverse_poincare_check(form, space, profile, h, c, 0.25);
    rp_ok = rp_ok && std::isfinite(ratio) && ratio >= 0.0;
    rp_max = std::max(rp_max, ratio);
    rp_json.push_back({{"center", c}, {"ratio", ratio}});
  }
  res.summary["reverse_poincare"] = {{"radius", 0.25}, {"max_ratio", rp_max},
                                     {"samples", rp_json}};

  res.summary["checks"]["partition_exact_properties"] = partition_ok;
  res.summary["checks"]["partition_constants_stable"] = stable;
  res.summary["checks"]["piecewise_harmonic_contract"] = ph_ok;
  res.summary["checks"]["ball_average_modulus_bound"] = ba_ok;
  res.summary["checks"]["reverse_poincare_finite"] = rp_ok;
  res.ok = partition_ok && stable && ph_ok && ba_ok && rp_ok;

  if (!cfg.out_dir.empty()) {
    std::ostringstream pf;
    pf << "eps,net_size,c_lip,c_energy,c_density\n";
    for (const auto& row : part_json)
      pf << fmt(row["eps"].get<double>()) << "," << row["net_size"].get<int>() << ","
         << fmt(row["c_lip"].get<double>()) << "," << fmt(row["c_energy"].get<double>()) << ","
         << fmt(row["c_density"].get<double>()) << "\n";
    write_text(cfg.out_dir, "partition.csv", pf.str());
    std::ostringstream af;
    af << "input,n,sup_error,energy\n";
    for (const auto& row : ph_json)
      af << row["input"].get<std::string>() << "," << row["n"].get<int>() << ","
         << fmt(row["sup_error"].get<double>()) << "," << fmt(row["energy"].get<double>())
         << "\n";
    write_text(cfg.out_dir, "approx.csv", af.str());
    write_text(cfg.out_dir, "summary.json", res.summary.dump(2) + "\n");
  }
  return res;
}

// ---------------------------------------------------------------------------
// hke
// ---------------------------------------------------------------------------

ExperimentResult run_hke(const ExperimentConfig& cfg) {
  const int depth = effective_depth(cfg);
  const int d_hi = std::min(depth, 5);
  const int d_lo = std::max(std::min(4, d_hi), 1);
  const ScaledFormParams params = ScaledFormParams::make(cfg.spec);
  const ScalingProfile profile = ScalingProfile::make(cfg.spec);

  ExperimentResult res;
  res.summary = base_summary(cfg, depth);

  std::vector<EnvelopeSample> samples;
  bool symmetric_ok = true;
  std::ostringstream csv;
  csv << "depth,t,x,y,d,p,ball_mass\n";
  for (int n = d_lo; n <= d_hi; ++n) {
    const GasketGraph g = build_graph(cfg.spec, n);
    const QuadraticForm form = assemble_form(g, params);
    const WalkOperator walk = build_walk(form, 0.5);
    const CellMeasure cm = uniform_cell_measure(g);
    const VertexMeasure vm = vertex_measure_from_cells(g, cm);
    const FiniteMetricSpace space = FiniteMetricSpace::from_graph(g, vm);
    const double Tn = params.T_at(n);
    const std::vector<int> sources = seeded_sources(g.vertex_count(), 6, cfg.seed);

    for (double t : {0.02, 0.05, 0.125}) {
      const int k = std::max(1, static_cast<int>(std::lround(t * Tn)));
      const double radius = profile.psi_inverse(t);
      std::map<int, Vector> rows;
      for (int x : sources) rows[x] = heat_kernel_row(walk, k, x, vm);
      for (int x : sources) {
        const std::vector<double> dist = space.row(x);
        const double mb = space.ball_mass(x, radius);
        const Vector& p = rows[x];
        for (int y = 0; y < g.vertex_count(); ++y) {
          samples.push_back({n, t, dist[static_cast<std::size_t>(y)], p[y], mb});
          csv << n << "," << fmt(t) << "," << x << "," << y << ","
              << fmt(dist[static_cast<std::size_t>(y)]) << "," << fmt(p[y]) << "," << fmt(mb)
              << "\n";
        }
      }
      // reversibility of the density rows across source pairs
      for (std::size_t a = 0; a < sources.size(); ++a)
        for (std::size_t b = a + 1; b < sources.size(); ++b) {
          const double pab = rows[sources[a]][sources[b]];
          const double pba = rows[sources[b]][sources[a]];
          if (std::abs(pab - pba) > 1e-10 * std::max(1.0, std::abs(pab))) symmetric_ok = false;
        }
    }
  }

  const EnvelopeReport rep = heat_kernel_envelope_check(samples, profile);
  res.summary["envelope"] = {{"c1", rep.c1},
                             {"c2", rep.c2},
                             {"C1", rep.C1},
                             {"c3", rep.c3},
                             {"delta", rep.delta},
                             {"upper_count", rep.upper_count},
                             {"lower_count", rep.lower_count},
                             {"upper_violations", rep.upper_violations},
                             {"lower_violations", rep.lower_violations}};
  res.summary["sample_count"] = static_cast<int>(samples.size());

  const bool fit_ok = rep.upper_violations == 0 && rep.lower_violations == 0 &&
                      rep.c3 > 0.05 && rep.c1 > 0.0 && std::isfinite(rep.C1);
  res.summary["checks"]["envelopes_hold_at_fitted_constants"] = fit_ok;
  res.summary["checks"]["density_rows_symmetric"] = symmetric_ok;
  res.ok = fit_ok && symmetric_ok;

  if (!cfg.out_dir.empty()) {
    write_text(cfg.out_dir, "samples.csv", csv.str());
    write_text(cfg.out_dir, "summary.json", res.summary.dump(2) + "\n");
  }
  return res;
}

} // namespace

// ---------------------------------------------------------------------------
// config parsing and dispatch
// ---------------------------------------------------------------------------

ExperimentConfig parse_config_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  ExperimentConfig cfg;

  if (!j.contains("dimension")) throw ConfigError("missing field: dimension");
  if (!j["dimension"].is_number_integer()) throw ConfigError("field dimension must be an integer");
  cfg.spec.dimension = j["dimension"].get<int>();
  if (cfg.spec.dimension < 2) throw ConfigError("field dimension must be >= 2");

  if (!j.contains("levels")) throw ConfigError("missing field: levels");
  if (!j["levels"].is_array() || j["levels"].empty())
    throw ConfigError("field levels must be a non-empty array");
  for (const auto& item : j["levels"]) {
    if (!item.is_number_integer()) throw ConfigError("field levels must contain integers");
    const int l = item.get<int>();
    if (l < 2) throw ConfigError("field levels entries must be >= 2");
    cfg.spec.levels.push_back(l);
  }

  if (j.contains("depth")) {
    if (!j["depth"].is_number_integer()) throw ConfigError("field depth must be an integer");
    cfg.depth = j["depth"].get<int>();
    if (cfg.depth < 1 || cfg.depth > static_cast<int>(cfg.spec.levels.size()))
      throw ConfigError("field depth must lie within the level schedule");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned())
      throw ConfigError("field seed must be an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) throw ConfigError("field kind must be a string");
    cfg.kind = j["kind"].get<std::string>();
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("field out must be a string");
    cfg.out_dir = j["out"].get<std::string>();
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config_json(j);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.spec.levels.empty()) throw ConfigError("level schedule is empty");
  if (static_cast<int>(cfg.spec.levels.size()) > 12)
    throw ConfigError("level schedule too deep for this build (max 12)");
  if (cfg.kind == "build") return run_build(cfg);
  if (cfg.kind == "scale") return run_scale(cfg);
  if (cfg.kind == "harmonic") return run_harmonic(cfg);
  if (cfg.kind == "singularity") return run_singularity(cfg);
  if (cfg.kind == "walk") return run_walk(cfg);
  if (cfg.kind == "metric") return run_metric(cfg);
  if (cfg.kind == "approx") return run_approx(cfg);
  if (cfg.kind == "hke") return run_hke(cfg);
  throw ConfigError("unknown experiment kind: " +
                    (cfg.kind.empty() ? std::string("(none)") : cfg.kind));
}

ExperimentResult run_all(const ExperimentConfig& base) {
  ExperimentResult total;
  total.summary["schema_version"] = "1.0";
  total.summary["kind"] = "all";
  total.ok = true;
  for (const std::string kind : {"build", "scale", "harmonic", "singularity", "walk",
                                 "metric", "approx", "hke"}) {
    ExperimentConfig cfg = base;
    cfg.kind = kind;
    if (!base.out_dir.empty()) cfg.out_dir = base.out_dir + "/" + kind;
    const ExperimentResult r = run_experiment(cfg);
    total.summary["experiments"][kind] = r.summary;
    total.summary["experiments"][kind]["ok"] = r.ok;
    total.ok = total.ok && r.ok;
  }
  total.summary["ok"] = total.ok;
  if (!base.out_dir.empty())
    write_text(base.out_dir, "summary.json", total.summary.dump(2) + "\n");
  return total;
}

} // namespace gasketlab

// Unit tests: config parsing, experiment dispatch, summary invariants,
// determinism of seeded runs, and artifact emission.
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "gasketlab/experiment.hpp"
#include "test_support.hpp"

using namespace gasketlab;
using nlohmann::json;
using testlab::sg2_spec;

namespace {

const double kLog2Of5 = std::log2(5.0);

std::string config_error_for(const json& j) {
  try {
    parse_config_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("gasketlab_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ExperimentConfig sg2_config(int depth, const std::string& kind) {
  ExperimentConfig cfg;
  cfg.spec = sg2_spec(depth);
  cfg.kind = kind;
  return cfg;
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parsing accepts the documented schema") {
  const json j = {{"dimension", 3}, {"levels", {2, 3, 4}}, {"depth", 2},
                  {"seed", 99},     {"kind", "scale"},     {"out", "artifacts"}};
  const ExperimentConfig cfg = parse_config_json(j);
  CHECK(cfg.spec.dimension == 3);
  REQUIRE(cfg.spec.levels.size() == 3u);
  CHECK(cfg.spec.levels[1] == 3);
  CHECK(cfg.depth == 2);
  CHECK(cfg.seed == 99u);
  CHECK(cfg.kind == "scale");
  CHECK(cfg.out_dir == "artifacts");

  // optional fields fall back to defaults
  const ExperimentConfig bare = parse_config_json({{"dimension", 2}, {"levels", {2, 2}}});
  CHECK(bare.depth == 0);
  CHECK(bare.seed == 12345u);
  CHECK(bare.kind.empty());
  CHECK(bare.out_dir.empty());
}

TEST_CASE("config errors name the offending field") {
  CHECK(config_error_for(json::array()).find("object") != std::string::npos);
  CHECK(config_error_for({{"levels", {2}}}).find("dimension") != std::string::npos);
  CHECK(config_error_for({{"dimension", 1}, {"levels", {2}}}).find("dimension") !=
        std::string::npos);
  CHECK(config_error_for({{"dimension", 2}}).find("levels") != std::string::npos);
  CHECK(config_error_for({{"dimension", 2}, {"levels", json::array()}}).find("levels") !=
        std::string::npos);
  CHECK(config_error_for({{"dimension", 2}, {"levels", {2, 1}}}).find("levels") !=
        std::string::npos);
  CHECK(config_error_for({{"dimension", 2}, {"levels", {2, "x"}}}).find("levels") !=
        std::string::npos);
  CHECK(config_error_for({{"dimension", 2}, {"levels", {2, 2}}, {"depth", 5}}).find("depth") !=
        std::string::npos);
  CHECK(config_error_for({{"dimension", 2}, {"levels", {2}}, {"kind", 7}}).find("kind") !=
        std::string::npos);
}

TEST_CASE("config files parse or fail with a clear error") {
  const auto dir = fresh_dir("config");
  const auto good = dir / "good.json";
  {
    std::ofstream out(good);
    out << R"({"dimension": 2, "levels": [2, 2, 2], "kind": "build"})";
  }
  const ExperimentConfig cfg = parse_config_file(good.string());
  CHECK(cfg.spec.dimension == 2);
  CHECK(cfg.kind == "build");

  const auto broken = dir / "broken.json";
  {
    std::ofstream out(broken);
    out << "{ this is not json";
  }
  CHECK_THROWS_AS(parse_config_file(broken.string()), ConfigError);
  CHECK_THROWS_AS(parse_config_file((dir / "missing.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dispatch rejects unknown kinds and out-of-range depth") {
  CHECK_THROWS_AS(run_experiment(sg2_config(2, "frobnicate")), ConfigError);
  ExperimentConfig cfg = sg2_config(2, "build");
  cfg.depth = 7;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  ExperimentConfig empty;
  empty.kind = "build";
  CHECK_THROWS_AS(run_experiment(empty), ConfigError);
}

TEST_CASE("build experiment reports exact depth-two counts and artifacts") {
  const auto dir = fresh_dir("build");
  ExperimentConfig cfg = sg2_config(2, "build");
  cfg.out_dir = dir.string();
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.ok);
  CHECK(res.summary["vertex_count"].get<int>() == 15);
  CHECK(res.summary["cell_count"].get<int>() == 9);
  CHECK(res.summary["edge_count"].get<int>() == 27);
  CHECK(res.summary["denominator"].get<std::string>() == "4");
  CHECK(res.summary["checks"]["cell_count_matches_product"].get<bool>());
  CHECK(res.summary["checks"]["connected"].get<bool>());
  for (const char* name : {"vertices.csv", "cells.csv", "edges.csv", "summary.json"})
    CHECK(std::filesystem::exists(dir / name));
  const json reread = json::parse(std::ifstream(dir / "summary.json"));
  CHECK(reread["vertex_count"].get<int>() == 15);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scale experiment pins the level table and regime") {
  const ExperimentResult res = run_experiment(sg2_config(3, "scale"));
  CHECK(res.ok);
  REQUIRE(res.summary["levels_table"].size() == 3u);
  CHECK(res.summary["levels_table"][0]["r"].get<double>() ==
        doctest::Approx(0.6).epsilon(1e-12));
  CHECK(res.summary["levels_table"][0]["r_exact"].get<std::string>() == "3/5");
  CHECK(res.summary["beta_min"].get<double>() == doctest::Approx(kLog2Of5).epsilon(1e-12));
  CHECK(res.summary["beta_max"].get<double>() == doctest::Approx(kLog2Of5).epsilon(1e-12));
  CHECK(res.summary["breakpoint_residual"].get<double>() < 1e-12);
  CHECK(res.summary["phi_power_law_residual"].get<double>() < 1e-8);
  CHECK(res.summary["regime"]["tag"].get<std::string>() == "singular");
}

TEST_CASE("singularity experiment reproduces the pinned trajectory") {
  const double minimal[] = {0.983333333333, 0.916666666667, 0.876984126984, 0.807179987005};
  const ExperimentResult res = run_experiment(sg2_config(4, "singularity"));
  CHECK(res.ok);
  REQUIRE(res.summary["minimal_mass"].size() == 4u);
  for (int i = 0; i < 4; ++i)
    CHECK(res.summary["minimal_mass"][i].get<double>() ==
          doctest::Approx(minimal[i]).epsilon(1e-9));
  CHECK(res.summary["checks"]["minimal_mass_strictly_decreasing"].get<bool>());
  CHECK(res.summary["checks"]["entropy_rate_nondecreasing"].get<bool>());
  CHECK(res.summary["checks"]["identity_profile_reads_one_minus_delta"].get<bool>());
}

TEST_CASE("walk experiment lands near the time-scaling exponent") {
  const ExperimentResult res = run_experiment(sg2_config(4, "walk"));
  CHECK(res.ok);
  const double slope = res.summary["slope"].get<double>();
  CHECK(slope > 2.0);
  CHECK(slope < 2.6);
  CHECK(res.summary["checks"]["montecarlo_within_3_sigma"].get<bool>());
  CHECK(res.summary["checks"]["exit_time_monotone_in_radius"].get<bool>());
}

TEST_CASE("metric experiment separates graph and straight-line scalings") {
  const ExperimentResult res = run_experiment(sg2_config(4, "metric"));
  CHECK(res.ok);
  CHECK(res.summary["chain_constant"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.summary["straight_line_chain_constant"].get<double>() ==
        doctest::Approx(1.8).epsilon(1e-9));
  CHECK(res.summary["checks"]["midpoint_bounds_hold"].get<bool>());
  CHECK(res.summary["checks"]["nets_deterministic_and_covering"].get<bool>());
}

TEST_CASE("approx experiment reproduces the pinned partition row") {
  const ExperimentResult res = run_experiment(sg2_config(5, "approx"));
  CHECK(res.ok);
  const json& rows = res.summary["partition"];
  REQUIRE(rows.size() == 3u);
  CHECK(rows[0]["eps"].get<double>() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rows[0]["net_size"].get<int>() == 14);
  CHECK(rows[0]["c_lip"].get<double>() == doctest::Approx(0.478260869565).epsilon(1e-6));
  CHECK(rows[0]["c_energy"].get<double>() == doctest::Approx(1.08575343436).epsilon(1e-6));
  CHECK(rows[0]["c_density"].get<double>() == doctest::Approx(3.32192834882).epsilon(1e-6));
  CHECK(res.summary["checks"]["partition_constants_stable"].get<bool>());
  CHECK(res.summary["checks"]["piecewise_harmonic_contract"].get<bool>());
  CHECK(res.summary["checks"]["reverse_poincare_finite"].get<bool>());
}

TEST_CASE("hke experiment fits a clean envelope") {
  const ExperimentResult res = run_experiment(sg2_config(4, "hke"));
  CHECK(res.ok);
  CHECK(res.summary["envelope"]["upper_violations"].get<int>() == 0);
  CHECK(res.summary["envelope"]["lower_violations"].get<int>() == 0);
  CHECK(res.summary["envelope"]["c1"].get<double>() > 0.0);
  CHECK(res.summary["envelope"]["c3"].get<double>() > 0.05);
  CHECK(res.summary["checks"]["density_rows_symmetric"].get<bool>());
}

TEST_CASE("seeded experiments are reproducible") {
  const ExperimentResult a = run_experiment(sg2_config(3, "metric"));
  const ExperimentResult b = run_experiment(sg2_config(3, "metric"));
  CHECK(a.summary.dump() == b.summary.dump());
  CHECK(a.ok == b.ok);
}

TEST_CASE("the aggregate run covers every experiment kind") {
  ExperimentConfig cfg;
  cfg.spec = sg2_spec(5);
  const ExperimentResult res = run_all(cfg);
  CHECK(res.ok);
  CHECK(res.summary["kind"].get<std::string>() == "all");
  const json& ex = res.summary["experiments"];
  REQUIRE(ex.size() == 8u);
  for (const char* kind :
       {"build", "scale", "harmonic", "singularity", "walk", "metric", "approx", "hke"}) {
    REQUIRE(ex.contains(kind));
    CHECK(ex[kind]["ok"].get<bool>());
  }
}

} // TEST_SUITE

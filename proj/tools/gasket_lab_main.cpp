// gasket-lab: build scale-irregular gasket graphs and run the numerical
// experiment suite. Exit codes: 0 all checks pass, 1 invariant failure,
// 2 usage or configuration error.
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gasketlab/experiment.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  int dimension = 0;
  int level = 0;
  std::vector<int> levels;
  int depth = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  bool all = false;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file");
  cmd->add_option("--dimension", opt.dimension, "simplex dimension N (>= 2)");
  cmd->add_option("--level", opt.level, "constant subdivision level l (>= 2)");
  cmd->add_option("--levels", opt.levels, "explicit level schedule l_1 l_2 ...");
  cmd->add_option("--depth", opt.depth, "construction depth n");
  auto* s = cmd->add_option("--seed", opt.seed, "RNG seed");
  s->each([&opt](const std::string&) { opt.seed_set = true; });
  cmd->add_option("--out", opt.out_dir, "output directory for artifacts");
}

gasketlab::ExperimentConfig make_config(const CliOptions& opt, const std::string& kind) {
  gasketlab::ExperimentConfig cfg;
  bool have_spec = false;
  if (!opt.config_path.empty()) {
    cfg = gasketlab::parse_config_file(opt.config_path);
    have_spec = true;
  }
  if (opt.dimension > 0) {
    cfg.spec.dimension = opt.dimension;
    have_spec = have_spec || !opt.levels.empty() || opt.level > 0;
  }
  if (!opt.levels.empty()) {
    cfg.spec.levels = opt.levels;
    have_spec = true;
  } else if (opt.level > 0) {
    const int n = opt.depth > 0 ? opt.depth : 4;
    cfg.spec.levels.assign(static_cast<std::size_t>(n), opt.level);
    have_spec = true;
  }
  if (!have_spec) {
    // default instance: the dimension-2 gasket with constant level 2
    if (cfg.spec.dimension == 0) cfg.spec.dimension = 2;
    if (cfg.spec.levels.empty()) {
      const int n = opt.depth > 0 ? opt.depth : 5;
      cfg.spec.levels.assign(static_cast<std::size_t>(n), 2);
    }
  }
  if (cfg.spec.dimension == 0) cfg.spec.dimension = 2;
  if (opt.depth > 0) cfg.depth = opt.depth;
  if (opt.seed_set) cfg.seed = opt.seed;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (!kind.empty()) cfg.kind = kind;
  return cfg;
}

int execute(const CliOptions& opt, const std::string& kind) {
  try {
    gasketlab::ExperimentResult result;
    if (opt.all) {
      result = gasketlab::run_all(make_config(opt, ""));
    } else {
      const gasketlab::ExperimentConfig cfg = make_config(opt, kind);
      if (cfg.kind.empty()) {
        std::cerr << "error: no experiment kind given (subcommand, config \"kind\", or --all)\n";
        return 2;
      }
      result = gasketlab::run_experiment(cfg);
    }
    std::cout << result.summary.dump(2) << "\n";
    if (!result.ok) {
      std::cerr << "invariant check failed\n";
      return 1;
    }
    return 0;
  } catch (const gasketlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for scale-irregular gasket Dirichlet forms"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"build", "scale",  "harmonic", "singularity",
                                          "walk",  "metric", "approx",   "hke"};
  std::vector<CliOptions> opts(kinds.size() + 1);
  int rc = 0;
  bool ran = false;

  for (std::size_t i = 0; i < kinds.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(kinds[i], "run the " + kinds[i] + " experiment");
    add_common_flags(cmd, opts[i]);
    const std::string kind = kinds[i];
    CliOptions* o = &opts[i];
    cmd->callback([o, kind, &rc, &ran]() {
      rc = execute(*o, kind);
      ran = true;
    });
  }

  CLI::App* run_cmd = app.add_subcommand("run", "run a configured experiment or the full suite");
  CliOptions* run_opt = &opts[kinds.size()];
  add_common_flags(run_cmd, *run_opt);
  run_cmd->add_flag("--all", run_opt->all, "run every experiment kind");
  run_cmd->callback([run_opt, &rc, &ran]() {
    rc = execute(*run_opt, "");
    ran = true;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return ran ? rc : 2;
}

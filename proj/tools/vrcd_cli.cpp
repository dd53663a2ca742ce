#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrcd/harness.hpp"
#include "vrcd/theory.hpp"
#include "vrcd/verify.hpp"

namespace {

using vrcd::harness::ExperimentConfig;

void apply_overrides(ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                     long long budget, const std::string& out, bool paper_scale) {
  if (!seeds.empty()) config.seeds = seeds;
  if (budget > 0) config.budget = budget;
  if (!out.empty()) config.out_dir = out;
  if (paper_scale) config.d = 1000;
}

void print_params(const ExperimentConfig& config) {
  const auto built = vrcd::harness::build_experiment(config);
  const auto& tp = built.params;
  std::printf("d:                   %d\n", built.problem.dim);
  std::printf("mu:                  %.12g\n", tp.mu);
  std::printf("L:                   %.12g\n", tp.big_l);
  std::printf("calL:                %.12g\n", tp.calL);
  std::printf("expected smoothness: %.12g\n", tp.expected_smoothness);
  std::printf("rho:                 %.12g\n", tp.rho);
  std::printf("sega   alpha: %-14.10g complexity: %.6g\n", tp.sega.alpha, tp.sega.complexity);
  std::printf("svrcd  alpha: %-14.10g complexity: %.6g\n", tp.svrcd.alpha, tp.svrcd.complexity);
  std::printf("asvrcd eta: %.10g theta1: %.10g theta2: %.10g gamma: %.10g beta: %.10g\n",
              tp.accelerated.eta, tp.accelerated.theta1, tp.accelerated.theta2,
              tp.accelerated.gamma, tp.accelerated.beta);
  std::printf("asvrcd complexity: %.6g  contraction/step: %.6g\n", tp.accelerated.complexity,
              tp.accelerated.contraction);
  std::printf("reference optimum: %.12g\n", built.reference.optimum);
}

int run_verify(bool full) {
  const auto results = vrcd::verify::acceptance_checks(full);
  bool all_pass = true;
  for (const auto& result : results) {
    const char* tag = result.skipped ? "SKIP" : (result.pass ? "PASS" : "FAIL");
    std::printf("[%s] %-42s %s\n", tag, result.name.c_str(), result.detail.c_str());
    all_pass = all_pass && result.pass;
  }
  std::printf("%s\n", all_pass ? "all checks passed" : "CHECKS FAILED");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variance-reduced coordinate descent benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::uint64_t> seeds;
  long long budget = 0;
  std::string out;
  bool paper_scale = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seeds, "seed list override");
    cmd->add_option("--budget", budget, "iteration budget override");
    cmd->add_option("--out", out, "output directory override");
    cmd->add_flag("--paper-scale", paper_scale, "d = 1000 instances");
  };

  CLI::App* run = app.add_subcommand("run", "run a single experiment from a config file");
  run->add_option("--config", config_path, "config file")->required();
  add_common(run);

  CLI::App* sweep = app.add_subcommand("sweep", "run a figure preset");
  int figure = 1;
  int matrix_type = 1;
  sweep->add_option("--figure", figure, "1 or 2")->check(CLI::Range(1, 2));
  sweep->add_option("--type", matrix_type, "matrix type for figure 2")->check(CLI::Range(1, 4));
  add_common(sweep);

  CLI::App* verify = app.add_subcommand("verify", "run the theory/equivalence checks");
  bool full = false;
  verify->add_flag("--full", full, "include the long empirical convergence checks");

  CLI::App* params = app.add_subcommand("params", "print derived parameters for a config");
  params->add_option("--config", config_path, "config file")->required();
  add_common(params);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig config = vrcd::harness::load_config(config_path);
      apply_overrides(config, seeds, budget, out, paper_scale);
      const auto written = vrcd::harness::run_experiment(config);
      for (const auto& path : written) std::printf("wrote %s\n", path.c_str());
    } else if (sweep->parsed()) {
      const int d = paper_scale ? 1000 : 200;
      std::vector<std::uint64_t> sweep_seeds = seeds.empty() ? std::vector<std::uint64_t>{1, 2, 3}
                                                             : seeds;
      const long long sweep_budget = budget > 0 ? budget : 200000;
      const std::string dir = out.empty() ? (figure == 1 ? "traces/figure1" : "traces/figure2")
                                          : out;
      const auto configs =
          figure == 1
              ? vrcd::harness::figure1_configs(d, dir, sweep_seeds, sweep_budget)
              : vrcd::harness::figure2_configs(matrix_type, d, dir, sweep_seeds, sweep_budget);
      for (const auto& config : configs) {
        const auto written = vrcd::harness::run_experiment(config);
        for (const auto& path : written) std::printf("wrote %s\n", path.c_str());
      }
    } else if (verify->parsed()) {
      return run_verify(full);
    } else if (params->parsed()) {
      ExperimentConfig config = vrcd::harness::load_config(config_path);
      apply_overrides(config, seeds, budget, out, paper_scale);
      print_params(config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

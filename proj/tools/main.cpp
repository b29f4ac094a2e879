// ipwvar: inverse-probability-weighted regression with naive, robust and
// linearized variance estimators, plus the attrition simulation study.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using ipwvar::cli::RunConfig;

void add_seed_option(CLI::App* cmd, RunConfig& cfg, const std::string& help) {
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&cfg](const std::uint64_t& s) { cfg.seed = s; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse probability weighting for cohort attrition: fits and variance estimators"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig cfg;

  auto* fit = app.add_subcommand("fit", "Fit a weighted association model to a comma-delimited dataset");
  fit->add_option("--data", cfg.data, "Input table with a header row")->required();
  fit->add_option("--response-indicator", cfg.mapping.response_indicator, "0/1 response column")->required();
  fit->add_option("--outcome", cfg.mapping.outcome, "Outcome column")->required();
  fit->add_option("--response-covariates", cfg.mapping.response_covariates,
                  "Response-model covariates (fully observed)")
      ->delimiter(',');
  fit->add_option("--assoc-covariates", cfg.mapping.assoc_covariates, "Association-model covariates")
      ->delimiter(',');
  fit->add_option("--variance-structure", cfg.mapping.variance_structure, "Known variance-structure column v_i");
  fit->add_option("--estimator", cfg.estimator, "naive | robust | linearized | all, or a comma list")
      ->capture_default_str();
  fit->add_flag("--naive-unscaled", cfg.naive_unscaled,
                "Also report the unscaled (sum Z Z^T / p)^-1 naive form for comparison");
  fit->add_option("--out", cfg.out, "Output file (default: stdout)");

  auto* simulate = app.add_subcommand("simulate", "Run the Monte-Carlo relative-bias study");
  simulate->add_option("--scenario", cfg.scenario, "Scenario label(s), comma separated, or 'all'")
      ->capture_default_str();
  simulate->add_option("--reps", cfg.reps, "Replicates per scenario")->capture_default_str();
  simulate->add_option("--ref-reps", cfg.ref_reps, "Reference-run replicates (default: --reps)");
  add_seed_option(simulate, cfg, "Base seed (default 2024)");
  simulate->add_option("--parallelism", cfg.parallelism, "Worker threads (0: all cores)")->capture_default_str();
  simulate->add_option("--registry", cfg.registry, "Scenario registry written by 'calibrate' (default: built-in)");
  simulate->add_option("--records", cfg.records, "Also write per-replicate records here");
  simulate->add_option("--cohort-size", cfg.cohort_size, "Individuals per generated cohort")->capture_default_str();
  simulate->add_flag("--include-exposure", cfg.include_exposure,
                     "Put the exposure in the fitted response model even when it has no effect");
  simulate->add_option("--out", cfg.out, "Report file (default: stdout); siblings .extended/.summary are written too");

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate gamma_0 for all nine scenarios");
  calibrate->add_option("--target-rate", cfg.target_rate, "Mean response rate to hit")->capture_default_str();
  add_seed_option(calibrate, cfg, "Derivation seed (default 1085)");
  calibrate->add_option("--population", cfg.population, "Calibration population size")->capture_default_str();
  calibrate->add_option("--out", cfg.out, "Registry file (default: stdout)");

  auto* report = app.add_subcommand("report", "Re-aggregate saved replicate records into a report");
  report->add_option("--data", cfg.data, "Replicate-record file written by 'simulate --records'")->required();
  add_seed_option(report, cfg, "Override the seed recorded in the file");
  report->add_option("--out", cfg.out, "Report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ipwvar::cli::kExitUsage;
  }

  if (fit->parsed()) return ipwvar::cli::cmd_fit(cfg, std::cout, std::cerr);
  if (simulate->parsed()) return ipwvar::cli::cmd_simulate(cfg, std::cout, std::cerr);
  if (calibrate->parsed()) return ipwvar::cli::cmd_calibrate(cfg, std::cout, std::cerr);
  if (report->parsed()) return ipwvar::cli::cmd_report(cfg, std::cout, std::cerr);
  return ipwvar::cli::kExitUsage;
}

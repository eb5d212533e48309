// qeraser: command-line front end for the entangled double-slit /
// quantum-eraser simulation engine.
//
// Subcommands:
//   init    write a preset configuration file
//   run     execute a config: analytic patterns, optional sampled events,
//           ledger, and report.json
//   report  re-sort a ledger by analyzer subsets and print verdicts as JSON
//   sweep   marking-strength sweep emitting V, D, V^2+D^2 per point
//
// Exit codes: 0 success, 2 configuration/schema error, 3 physics-contract
// violation, 4 ledger/config mismatch.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qe/csvio.hpp"
#include "qe/experiment.hpp"

namespace {

int run_init(const std::string& preset, const std::string& out_path) {
  const qe::ExperimentConfig config =
      qe::default_config(qe::parse_preset(preset));
  qe::save_config(out_path, config);
  std::cout << "wrote " << out_path << " (preset " << preset << ")\n";
  return 0;
}

int run_run(const std::string& config_path,
            const std::optional<std::uint64_t>& seed,
            const std::string& out_dir) {
  qe::ExperimentConfig config = qe::load_config(config_path);
  if (seed) {
    if (!config.sampler)
      throw qe::config_error(
          "--seed given but the config has no sampler to seed");
    config.sampler->rng_seed = *seed;
  }
  if (!out_dir.empty()) config.output_dir = out_dir;

  const qe::RunArtifacts artifacts = qe::run_experiment(config);
  std::cout << "preset " << qe::preset_label(config.preset) << ": wrote "
            << artifacts.files.size() << " files to "
            << artifacts.directory.string() << "\n";
  const auto& analytic = artifacts.report["analytic"];
  std::cout << "  visibility_marginal    "
            << analytic["visibility_marginal"].dump() << "\n"
            << "  distinguishability     "
            << analytic["distinguishability"].dump() << "\n"
            << "  duality_sum            " << analytic["duality_sum"].dump()
            << "\n";
  if (artifacts.report.contains("sampled")) {
    const auto& sampled = artifacts.report["sampled"];
    std::cout << "  coincidences           " << sampled["coincidences"].dump()
              << " (seed " << sampled["rng_seed"].dump() << ")\n";
  }
  return 0;
}

int run_report(const std::string& config_path, const std::string& ledger_path,
               const std::vector<std::string>& selector_args) {
  const qe::ExperimentConfig config = qe::load_config(config_path);
  std::vector<qe::SubsetSelector> selectors;
  if (selector_args.empty()) {
    selectors.push_back(qe::SubsetSelector::all());
  } else {
    for (const std::string& text : selector_args)
      selectors.push_back(qe::SubsetSelector::parse(text));
  }
  const auto json = qe::report_from_ledger(ledger_path, config, selectors);
  std::cout << json.dump(2) << "\n";
  return 0;
}

int run_sweep(const std::string& mode_text, std::size_t points,
              const std::string& config_path, const std::string& out_path) {
  qe::ExperimentConfig base;  // defaults when no config is given
  if (!config_path.empty()) base = qe::load_config(config_path);
  const qe::SweepMode mode = qe::parse_sweep_mode(mode_text);
  const auto rows = qe::duality_sweep(base, mode, points);
  const std::string csv = qe::sweep_to_csv(rows);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
      throw qe::config_error("cannot open for writing: " + out_path);
    out << csv;
    std::cout << "wrote " << out_path << " (" << rows.size() << " points)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qeraser: polarization-entangled double-slit simulator with path "
      "marking, erasure, and delayed-choice re-sorting"};
  app.require_subcommand(1);

  auto* init = app.add_subcommand("init", "Write a preset configuration file");
  std::string init_preset = "eraser";
  std::string init_out = "qeraser.json";
  init->add_option("--preset", init_preset,
                   "young | marked | eraser | delayed");
  init->add_option("--out", init_out, "Config file to write");

  auto* run = app.add_subcommand("run", "Execute a configuration");
  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  std::string run_out;
  run->add_option("--config", run_config, "Config file")->required();
  run->add_option("--seed", run_seed, "Override the sampler RNG seed");
  run->add_option("--out", run_out, "Override the output directory");

  auto* report = app.add_subcommand(
      "report", "Sort a ledger into analyzer subsets and print JSON metrics");
  std::string report_config;
  std::string report_ledger;
  std::vector<std::string> report_selectors;
  report->add_option("--config", report_config, "Config of the ledger's run")
      ->required();
  report->add_option("--ledger", report_ledger, "Ledger CSV file")->required();
  report->add_option("selectors", report_selectors,
                     "Subset selectors: all, +45, -45, H, V, R, L");

  auto* sweep = app.add_subcommand(
      "sweep", "Marking-strength duality sweep (V, D, V^2+D^2 per point)");
  std::string sweep_mode = "angle";
  std::size_t sweep_points = 33;
  std::string sweep_config;
  std::string sweep_out;
  sweep->add_option("--mode", sweep_mode, "angle | retardance");
  sweep->add_option("--points", sweep_points, "Sweep points (default 33)");
  sweep->add_option("--config", sweep_config,
                    "Config supplying geometry and source");
  sweep->add_option("--out", sweep_out, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;  // bad usage is a configuration error
  }

  try {
    if (*init) return run_init(init_preset, init_out);
    if (*run) return run_run(run_config, run_seed, run_out);
    if (*report) return run_report(report_config, report_ledger,
                                   report_selectors);
    if (*sweep) return run_sweep(sweep_mode, sweep_points, sweep_config,
                                 sweep_out);
  } catch (const qe::mismatch_error& err) {
    std::cerr << "mismatch error: " << err.what() << "\n";
    return 4;
  } catch (const qe::config_error& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const qe::contract_error& err) {
    std::cerr << "contract error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

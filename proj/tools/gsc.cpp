// gsc: simulate, analyze, fit and score governed short-circuit recordings.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsc/cli.hpp"
#include "gsc/report.hpp"

int main(int argc, char** argv) {
  using gsc::cli::Format;

  CLI::App app{"Governed short-circuit toolkit"};
  app.set_version_flag("--version", std::string(gsc::report::version()));

  gsc::cli::RunConfig rc;
  std::string command;
  std::vector<std::string> inputs;
  std::string output, config, scenario, format, plot_dir;
  std::vector<double> cccs_weights, cvi_weights;
  std::uint64_t seed = 0;
  std::size_t bins = 0, window = 0, hop = 0;
  double k = 0.0;

  app.add_option("command", command, "simulate | analyze | fit | metrics | validate | report")
      ->required()
      ->check(CLI::IsMember({"simulate", "analyze", "fit", "metrics", "validate", "report"}));
  app.add_option("-i,--input", inputs, "Input file(s); repeatable");
  auto* o_output = app.add_option("-o,--output", output, "Output file (directory for plot csv)");
  auto* o_config = app.add_option("-c,--config", config, "TOML config file (default $GSC_CONFIG)");
  auto* o_scenario =
      app.add_option("--scenario", scenario, "Calibration weighting scenario")
          ->check(CLI::IsMember({"transient_dominant", "steady_state", "balanced"}));
  auto* o_format =
      app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  auto* o_seed = app.add_option("--seed", seed, "Simulation seed");
  auto* o_bins = app.add_option("--bins", bins, "Histogram bins for transient complexity")
                     ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  auto* o_window = app.add_option("--window", window, "STFT window length, samples")
                       ->check(CLI::PositiveNumber);
  auto* o_hop = app.add_option("--hop", hop, "STFT hop, samples")->check(CLI::PositiveNumber);
  auto* o_k = app.add_option("--k", k, "Declared decay constant, 1/s (skips fitting)")
                  ->check(CLI::PositiveNumber);
  auto* o_cccs = app.add_option("--cccs-weights", cccs_weights, "Three CCCS weights")
                     ->expected(3)
                     ->delimiter(',');
  auto* o_cvi = app.add_option("--cvi-weights", cvi_weights, "Five CVI weights")
                    ->expected(5)
                    ->delimiter(',');
  auto* o_plot = app.add_option("--plot-dir", plot_dir, "Also write plot tables here (analyze)");
  app.add_flag("--ignore-labels", rc.ignore_labels, "Detect phases even when labels exist");
  app.add_option("-j,--jobs", rc.jobs, "Worker threads for multiple inputs (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "gsc: " << e.what() << "\n\n" << app.help();
    return gsc::cli::kExitUsage;
  }

  rc.command = *gsc::cli::parse_command(command);
  for (const auto& p : inputs) rc.inputs.emplace_back(p);
  if (*o_output) rc.output = output;
  if (*o_config) rc.config = config;
  if (*o_scenario) rc.scenario = scenario;
  if (*o_format) rc.format = format == "csv" ? Format::Csv : Format::Json;
  if (*o_seed) rc.seed = seed;
  if (*o_bins) rc.bins = bins;
  if (*o_window) rc.window = window;
  if (*o_hop) rc.hop = hop;
  if (*o_k) rc.k = k;
  if (*o_cccs) rc.cccs_weights = {cccs_weights[0], cccs_weights[1], cccs_weights[2]};
  if (*o_cvi) {
    rc.cvi_weights = {cvi_weights[0], cvi_weights[1], cvi_weights[2], cvi_weights[3],
                      cvi_weights[4]};
  }
  if (*o_plot) rc.plot_dir = plot_dir;

  return gsc::cli::run(rc, std::cout, std::cerr);
}

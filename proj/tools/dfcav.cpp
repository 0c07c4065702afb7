// Command-line experiment runner.
//
//   dfcav list
//   dfcav run --config fig2-optimal.ini --out results/fig2 [--grid-samples N]
//   dfcav --seed-figures configs/

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "dfcav/config.hpp"
#include "dfcav/error.hpp"
#include "dfcav/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitOther = 1;

int seed_figures(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, config] : dfc::figure_configs()) {
    dfc::detail::write_file(dir, name, dfc::format_config(config));
    std::cout << (dir / name).string() << "\n";
  }
  return 0;
}

int run(const std::string& config_path, const std::optional<std::string>& out_dir,
        const std::optional<std::size_t>& grid_samples) {
  dfc::ExperimentConfig config;
  try {
    config = dfc::load_config(config_path);
  } catch (const dfc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (grid_samples) config.grid.samples = *grid_samples;
  const std::string scenario = dfc::scenario_info(config.scenario).name;
  const std::filesystem::path dir = out_dir ? *out_dir : config.output_directory.value_or("results/" + scenario);

  try {
    const dfc::Json summary = dfc::run_scenario(config, dir);
    std::cout << summary.dump(2) << "\n";
  } catch (const dfc::Instability& e) {
    std::cerr << "error: scenario " << scenario << " diverged: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const dfc::Error& e) {
    std::cerr << "error: scenario " << scenario << ": " << e.what() << "\n";
    return kExitOther;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-mode-selective frequency conversion in a dichroic-finesse cavity"};
  app.require_subcommand(0, 1);

  std::string seed_dir;
  app.add_option("--seed-figures", seed_dir, "Write configuration files for every figure scenario into DIR");

  auto* list_cmd = app.add_subcommand("list", "List available scenarios with their default parameters");

  auto* run_cmd = app.add_subcommand("run", "Run one experiment configuration");
  std::string config_path;
  std::string out_dir;
  std::size_t grid_samples = 0;
  run_cmd->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  auto* out_opt = run_cmd->add_option("--out", out_dir, "Output directory for CSV and summary files");
  auto* samples_opt =
      run_cmd->add_option("--grid-samples", grid_samples, "Override the number of grid samples")->check(CLI::Range(2, 100000000));

  CLI11_PARSE(app, argc, argv);

  try {
    if (!seed_dir.empty()) {
      seed_figures(seed_dir);
      if (!list_cmd->parsed() && !run_cmd->parsed()) return 0;
    }
    if (list_cmd->parsed()) {
      std::cout << dfc::list_scenarios();
      return 0;
    }
    if (run_cmd->parsed()) {
      return run(config_path, out_opt->count() ? std::optional<std::string>(out_dir) : std::nullopt,
                 samples_opt->count() ? std::optional<std::size_t>(grid_samples) : std::nullopt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  if (seed_dir.empty()) std::cout << app.help();
  return 0;
}

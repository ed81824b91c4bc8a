#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "fwbt/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Frequency-weighted balanced truncation"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "reduce an example or a custom model");

  fwbt::cli::RunConfig config;
  std::string methods = "genbt,extbt";
  std::string t_grid;
  std::string custom;
  std::string out = ".";
  run->add_option("--example", config.example, "built-in example (1, 2 or 3)")->check(CLI::Range(1, 3));
  run->add_option("--custom", custom, "JSON file with a plant and optional weights")->check(CLI::ExistingFile);
  run->add_option("--methods", methods, "comma list of enns, genbt, extbt, extbt_ct")->capture_default_str();
  run->add_option("--t-grid", t_grid, "a:b:{lin|log10}[:k] for extbt_ct");
  run->add_option("--loop-max", config.loop_max, "alternating iterations")->capture_default_str();
  run->add_option("--seed", config.seed, "seed for example 3")->capture_default_str();
  run->add_option("--trials", config.trials, "example 3: number of seeds")->capture_default_str();
  run->add_option("--workers", config.workers, "parallel t values / trials")->capture_default_str();
  run->add_option("--out", out, "output directory")->capture_default_str();
  run->add_flag("!--no-errors", config.measure_errors, "skip measured H-infinity errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    config.methods = fwbt::cli::parse_methods(methods);
    if (!t_grid.empty()) config.t_grid = fwbt::cli::parse_t_grid(t_grid);
    if (!custom.empty()) config.custom_model = custom;
    config.output_dir = out;
    if (config.workers == 0) config.workers = std::max(1u, std::thread::hardware_concurrency());
  } catch (const fwbt::cli::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n" << run->help();
    return 2;
  }
  const int code = fwbt::cli::run(config, std::cout);
  if (code == 2) std::cerr << run->help();
  return code;
}

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>

#include "qlcontrol/experiment.hpp"
#include "qlcontrol/instances.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Batch runner for quasilinear elliptic control experiments"};
  app.require_subcommand(1);

  auto *run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> overrides;
  run->add_option("config", config_path, "Config file ([section] key = value)")->required();
  run->add_option("--seed", seed, "Seed, replaces [experiment] seed");
  run->add_option("--out", out, "Output directory, replaces [experiment] out");
  run->add_option("--override", overrides, "section.key=value, repeatable")->take_all();

  auto *list = app.add_subcommand("list", "Print the built-in instance catalog");
  std::string filter;
  list->add_option("filter", filter, "Substring of the instance name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*list) {
    std::cout << qlc::format_catalog(qlc::list_builtin(filter));
    return 0;
  }

  qlc::ExperimentConfig config;
  try {
    config = qlc::load_config(config_path, overrides);
  } catch (const std::exception &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  if (seed) config.seed = *seed;
  if (out) config.out = *out;

  const qlc::ExperimentOutcome outcome = qlc::run_experiment(config);
  try {
    qlc::write_outcome(config, outcome);
  } catch (const std::exception &e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  std::cout << outcome.summary;
  return outcome.exit_code;
}

#include <iostream>

#include <CLI11.hpp>

#include "lab/experiment.hpp"

int main(int argc, char** argv) {
  using namespace pitaron::lab;

  CLI::App app{"pitaron-lab: runs normalized-propagator experiments from JSON configs"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string out_dir = ".";
  int jobs = 1;
  auto* run_cmd = app.add_subcommand("run", "Run one or more experiment configs");
  run_cmd->add_option("configs", configs, "JSON config files")->required();
  run_cmd->add_option("--jobs,-j", jobs, "Configs to run concurrently")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out,-o", out_dir, "Output directory");

  std::string demo;
  std::string demo_out = ".";
  auto* demo_cmd = app.add_subcommand("demo", "Run a built-in config");
  demo_cmd->add_option("name", demo, "Demo name")->required()->check(CLI::IsMember(demo_names()));
  demo_cmd->add_option("--out,-o", demo_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run_cmd) {
    std::vector<std::filesystem::path> paths(configs.begin(), configs.end());
    return run_many(paths, out_dir, jobs, std::cerr);
  }
  try {
    return run_config(parse_config(demo_config(demo)), demo_out, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << demo << ": config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

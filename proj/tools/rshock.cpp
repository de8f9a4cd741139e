#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rshock/builtins.hpp"
#include "rshock/errors.hpp"
#include "rshock/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rshock: zero-temperature limits of twisted Kahler-Ricci flows on the flat torus"};
  app.require_subcommand(1);

  std::string config_path;
  bool assert_mode = false;
  std::vector<std::string> sets;
  CLI::App* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_flag("--assert", assert_mode, "Exit 3 when a hard check fails");
  run->add_option("--set", sets, "Override a config field: dotted.key=value")->take_all();

  CLI::App* list = app.add_subcommand("list-builtins", "List builtin Hamiltonians");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rshock::kExitConfig;
  }

  if (*list) {
    for (const auto& b : rshock::list_builtins()) std::cout << b.name << "  " << b.description << "\n";
    return rshock::kExitOk;
  }

  nlohmann::json config;
  try {
    std::ifstream in(config_path);
    if (!in) throw rshock::ConfigError("cannot open config " + config_path);
    config = nlohmann::json::parse(in);
    config = rshock::apply_overrides(std::move(config), sets);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rshock::kExitConfig;
  } catch (const rshock::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rshock::kExitConfig;
  }
  return rshock::run_experiment(config, assert_mode, std::cerr);
}

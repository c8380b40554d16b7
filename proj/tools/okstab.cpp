#include <iostream>

#include "CLI11.hpp"
#include "okstab/error.hpp"
#include "okstab/io/commands.hpp"
#include "okstab/io/scenario.hpp"

int main(int argc, char** argv) {
  using namespace okstab;
  CLI::App app{"Stability of critical configurations of the sharp-interface Ohta-Kawasaki energy"};
  app.set_version_flag("--version", io::version);
  std::string command;
  std::string scenario_path;
  io::Overrides ov;
  std::string out;
  int grid = 0;
  std::size_t nodes = 0;
  std::uint64_t seed = 0;
  app.add_option("command", command, "energy | critic | stability | dispersion | probe | flow | gammastar | diffuse")
      ->required()
      ->check(CLI::IsMember(io::command_names()));
  app.add_option("--scenario", scenario_path, "scenario file (JSON)")->required();
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* grid_opt = app.add_option("--grid", grid, "cells along x (y follows the aspect ratio)");
  auto* nodes_opt = app.add_option("--nodes", nodes, "interface node count");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*out_opt) ov.out = out;
  if (*grid_opt) ov.grid = grid;
  if (*nodes_opt) ov.nodes = nodes;
  if (*seed_opt) ov.seed = seed;

  try {
    io::Scenario s = io::load_scenario(scenario_path);
    io::apply_overrides(s, ov);
    return io::run_command(command, s, std::cout);
  } catch (const Error& e) {
    std::cerr << "okstab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "okstab: " << e.what() << "\n";
    return 1;
  }
}

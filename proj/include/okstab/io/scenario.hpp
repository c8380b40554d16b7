#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "okstab/domain.hpp"
#include "okstab/interface.hpp"
#include "okstab/secondvar.hpp"

namespace okstab::io {

struct ConfigurationSpec {
  enum class Kind { lamella, circle, chord, nodes };
  Kind kind = Kind::lamella;
  std::size_t nodes = 129;
  double a = 0.5;                  // lamella
  Vec2 center{0.5, 0.5};           // circle
  double radius = 0.25;
  bool e_inside = true;
  Vec2 from{0.5, 0.0};             // chord
  Vec2 to{0.5, 1.0};
  std::vector<Vec2> points;        // explicit node list
  Topology topology = Topology::chord;
  bool e_on_left = true;
};

struct StabilityParams {
  StabilityTolerances tolerances;
  int fourier_rank = 0;
};

struct DispersionParams {
  std::vector<int> modes{1, 2, 3};
};

struct ProbeParams {
  int samples = 100;
  std::vector<double> amplitudes;  // empty selects ten log-spaced values in [1e-3, 5e-2]
  int lambda_samples = 100;
  double critical_tolerance = 1e-2;
};

struct FlowParams {
  double dt = 0.0;  // 0 selects the stability bound
  int steps = 1000;
  int snapshot_every = 100;
};

struct GammaStarParams {
  double a = 0.5;
  int k_max = 0;
  double tol = 1e-6;
  double gamma_lo = 0.0;
  double gamma_hi = 40.0;
  int grid = 128;
  std::size_t nodes = 65;
};

struct DiffuseParams {
  double epsilon = 0.02;
  double gamma0 = 0.0;
  double dt = 0.0;  // 0 selects the stability bound
  int steps = 10000;
  int log_every = 100;
};

struct Scenario {
  DomainSpec domain;
  ConfigurationSpec configuration;
  double gamma = 1.0;
  std::uint64_t seed = 1;
  std::string output = "okstab_out";
  StabilityParams stability;
  DispersionParams dispersion;
  ProbeParams probe;
  FlowParams flow;
  GammaStarParams gammastar;
  DiffuseParams diffuse;
};

/// Strict parse of the JSON scenario format; unknown keys and type errors
/// name the key and its line in `text`.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

struct Overrides {
  std::optional<std::string> out;
  std::optional<int> grid;
  std::optional<std::size_t> nodes;
  std::optional<std::uint64_t> seed;
};

/// Command-line flags take precedence over scenario fields. `grid` sets nx
/// and scales ny by the aspect ratio.
void apply_overrides(Scenario& s, const Overrides& o);

Interface build_interface(const Scenario& s);

const char* to_string(ConfigurationSpec::Kind k);

}  // namespace okstab::io

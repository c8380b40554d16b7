#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "okstab/region.hpp"
#include "okstab/secondvar.hpp"

namespace okstab {

inline constexpr const char* probe_generator_name = "mt19937_64";

struct FlowStep {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double J = 0.0;
  double residual_sup = 0.0;
  double area = 0.0;
  double ortho_max = 0.0;  // largest endpoint angle, 0 for loops
  int halvings = 0;
};

struct FlowOptions {
  double dt = 0.0;
  int steps = 0;
  int snapshot_every = 0;   // 0 keeps only the initial and final interfaces
  double tolerance = 1e-6;  // relative J increase accepted per step
  int max_halvings = 8;
};

struct FlowResult {
  RegionState final_state;
  std::vector<FlowStep> log;          // entry 0 describes the initial state
  std::vector<Interface> snapshots;
};

/// Largest step admitted by the parabolic stability bound
/// 0.4 h^2 / max(1, sup|H|), h the mean segment length.
double flow_step_bound(const RegionState& state);

/// Explicit Euler descent along V = -(H + 4 gamma v - lambda) with the area
/// held fixed by a constant normal shift after every step.
FlowResult volume_preserving_flow(const RegionState& state, const FlowOptions& options);

/// Zero-mean band-limited normal displacement: modes 1..8 with
/// coefficients U(-1,1)/k^2, scaled to max|phi| = amplitude.
std::vector<double> random_normal_profile(const Interface& iface, double amplitude, std::mt19937_64& rng);

struct ProbeSample {
  double amplitude = 0.0;
  double symmetric_difference = 0.0;
  double delta_j = 0.0;
  double perimeter_drop = 0.0;  // P(E) - P(F)
  int rejections = 0;
};

struct ProbeReport {
  std::vector<ProbeSample> samples;
  double fitted_c = 0.0;
  double min_ratio = 0.0;
  double lambda_ratio_max = 0.0;
  double slope = 0.0;        // least-squares slope of log dJ against log amplitude (dJ > 0 only)
  int negative_count = 0;
  std::uint64_t seed = 0;
};

struct ProbeOptions {
  double critical_tolerance = 1e-2;
  int max_rejections = 10;
};

/// Random volume-preserving normal graphs F around E with J(F) - J(E) and
/// |F △ E|. Amplitudes are cycled over the samples.
ProbeReport minimality_probe(const RegionState& state, int n, std::span<const double> amplitudes,
                             std::uint64_t seed, const ProbeOptions& options = {});

struct LambdaReport {
  double ratio_max = 0.0;
  std::vector<ProbeSample> samples;  // the last ten are the gross perturbations
};

/// Empirical Lambda: max over perturbations G of (P(E) - P(G)) / |G △ E|.
LambdaReport lambda_minimality_check(const RegionState& state, int n, std::uint64_t seed);

struct LipschitzSample {
  double amplitude = 0.0;
  double symmetric_difference = 0.0;
  double dirichlet_gap = 0.0;  // |int |grad v_F|^2 - int |grad v_E|^2|
  double ratio = 0.0;
};

/// Ratios of the Dirichlet-energy gap to |F △ E| for normal graphs
/// phi = amplitude * (1 + 0.5 psi), psi a unit random profile. The volume
/// is not fixed, so the sets differ at first order.
std::vector<LipschitzSample> lipschitz_ratios(const RegionState& state, std::span<const double> amplitudes,
                                              std::uint64_t seed);

struct GammaSearchOptions {
  int grid = 128;
  std::size_t nodes = 65;
  double gamma_lo = 0.0;
  double gamma_hi = 40.0;
  int max_iter = 200;
};

struct GammaSearchResult {
  double gamma_star = 0.0;
  double mu_at_root = 0.0;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Root of mu_min(gamma) = 0 for the lamella {x < a} in the unit square by
/// bisection. `k_max` truncates the Green term to that many curve modes
/// (0 keeps the full matrix).
GammaSearchResult gamma_threshold_search(double a, int k_max, double tol, const GammaSearchOptions& options = {});

}  // namespace okstab

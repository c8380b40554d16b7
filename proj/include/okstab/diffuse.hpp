#pragma once

#include <vector>

#include "okstab/field.hpp"
#include "okstab/region.hpp"

namespace okstab {

/// Phase field u with interface width epsilon, nonlocal coupling gamma0
/// and conserved mean m.
struct DiffuseState {
  ScalarField u;
  double epsilon = 0.0;
  double gamma0 = 0.0;
  double m = 0.0;
};

/// State with m taken from the mean of u.
DiffuseState make_diffuse_state(ScalarField u, double epsilon, double gamma0);

struct DiffuseEnergyParts {
  double total = 0.0;
  double gradient = 0.0;  // eps * int |grad u|^2
  double well = 0.0;      // (1/eps) * int (u^2 - 1)^2
  double nonlocal = 0.0;  // gamma0 * int |grad v|^2, -Lap v = u - m
};

DiffuseEnergyParts diffuse_energy_parts(const DiffuseState& ds);
double diffuse_energy(const DiffuseState& ds);

/// Largest admitted explicit step, 0.1 * min(h^2 / eps, eps).
double diffuse_step_bound(const DiffuseState& ds);

struct DiffuseStep {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double energy = 0.0;
  double mass = 0.0;  // mean of u
  int halvings = 0;
};

struct DiffuseFlowOptions {
  double dt = 0.0;
  int steps = 0;
  int log_every = 1;
  int max_halvings = 8;
};

struct DiffuseFlowResult {
  DiffuseState final_state;
  std::vector<DiffuseStep> log;  // entry 0 describes the initial state
  int accepted_increases = 0;    // steps whose energy rose within round-off
};

/// Explicit L^2 gradient descent on E_eps with the mean of every update
/// removed, so mean(u) stays at m.
DiffuseFlowResult conserved_gradient_flow(const DiffuseState& ds, const DiffuseFlowOptions& options);

/// Sum over cells of |chi_{u>0} - fraction of E| times the cell area.
double sharp_limit_compare(const DiffuseState& ds, const RegionState& state);

/// 10-90% transition length of the row-averaged profile along x, measured
/// between the crossings of u = -0.8 and u = 0.8.
double interface_width_x(const ScalarField& u);

}  // namespace okstab

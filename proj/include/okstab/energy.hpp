#pragma once

#include <vector>

#include "okstab/region.hpp"

namespace okstab {

struct EnergyParts {
  double J = 0.0;   // P + NL
  double P = 0.0;   // perimeter of E inside the container
  double NL = 0.0;  // gamma * int |grad v_E|^2
};

EnergyParts energy_parts(const RegionState& state);
double total_energy(const RegionState& state);

/// Euler-Lagrange diagnostics of H_M + 4 gamma v_E = lambda on M.
struct CriticalityReport {
  double J = 0.0;
  double P = 0.0;
  double NL = 0.0;
  double lambda = 0.0;
  double residual_sup = 0.0;
  double residual_l2 = 0.0;
  std::vector<double> ortho_residual;  // one angle per chord endpoint, empty for loops
  std::vector<double> residual;        // per node
};

CriticalityReport criticality(const RegionState& state);

/// First-variation density H_M + 4 gamma v_E at each node.
std::vector<double> first_variation_density(const RegionState& state);

/// |F △ E| by exact polygon Boolean operations, with a pixel-count fallback
/// at 4x grid resolution.
double symmetric_difference_area(const Interface& e, const Interface& f, const DomainSpec& domain);

struct LipschitzGap {
  double nonlocal_gap = 0.0;          // |NL(F) - NL(E)|
  double symmetric_difference = 0.0;  // |F △ E|
};

LipschitzGap lipschitz_gap(const RegionState& e, const RegionState& f);

}  // namespace okstab

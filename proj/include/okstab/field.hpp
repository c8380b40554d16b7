#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "okstab/domain.hpp"
#include "okstab/interface.hpp"

namespace okstab {

/// One value per grid cell centre.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double fill = 0.0, bool mean_zero = false);
  ScalarField(const Grid& grid, std::vector<double> values, bool mean_zero = false);

  const Grid& grid() const { return grid_; }
  bool mean_zero() const { return mean_zero_; }
  std::size_t size() const { return values_.size(); }

  double& at(int i, int j) { return values_[grid_.index(i, j)]; }
  double at(int i, int j) const { return values_[grid_.index(i, j)]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double mean() const;
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> values_;
  bool mean_zero_;
};

/// Area fraction of the polygon region inside every cell, computed exactly
/// from the region boundary by Green's theorem.
std::vector<double> cell_fractions(const RegionPolygon& region, const Grid& grid);

/// Integral of the region against the bilinear hat function of every cell
/// centre (folded at walls, wrapped on the torus), divided by the cell
/// area. Smooth in the region boundary, unlike the plain fractions.
std::vector<double> hat_fractions(const RegionPolygon& region, const Grid& grid);

/// u = chi_E - chi_(Omega\E) as a cell-average field.
ScalarField rasterize_indicator(const Interface& iface, const Grid& grid);
/// The same indicator tested against hat functions; the Poisson source.
ScalarField hat_indicator(const Interface& iface, const Grid& grid);

struct PoissonOptions {
  double rel_tol = 1e-10;
  int max_iter = 0;  // 0 selects 20*(nx+ny)
  const ScalarField* initial_guess = nullptr;
};

struct PoissonStats {
  int iterations = 0;
  double residual = 0.0;  // final ||r|| / ||source||
};

/// Zero-mean solution of -Lap_h v = u - mean(u) with Neumann walls
/// (rectangle) or periodic wrapping (torus), by conjugate gradients.
ScalarField solve_potential(const ScalarField& u, const PoissonOptions& options = {},
                            PoissonStats* stats = nullptr);

/// Discrete integral of |grad v|^2 over face-centred differences.
double dirichlet_energy(const ScalarField& v);

/// Bilinear interpolation of cell values at points (Neumann reflection at
/// walls, periodic on the torus).
double sample(const ScalarField& v, Vec2 p);
/// Gradient interpolated from face-centred differences.
Vec2 sample_gradient(const ScalarField& v, Vec2 p);

std::vector<double> trace_on_curve(const ScalarField& v, const Interface& iface);
/// <grad v, nu_M> at every node.
std::vector<double> gradient_on_curve(const ScalarField& v, const Interface& iface);

/// Midpoint quadrature of the arclength measure on M spread to cell
/// centres with bilinear weights. `splat` turns nodal values of a piecewise
/// linear density into a cell source; `gather` is its transpose, pairing a
/// cell field with nodal test functions.
class LineSplat {
 public:
  LineSplat(const Interface& iface, const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t node_count() const { return node_count_; }

  /// Cell source density (per unit area) of phi*H^1 restricted to M.
  ScalarField splat(std::span<const double> phi) const;
  /// Integral over M of w times each nodal hat function.
  std::vector<double> gather(const ScalarField& w) const;

  /// Near-field correction of gather(solve(splat)): the bilinear footprint
  /// smears the normal-derivative jump of the potential across M, which
  /// biases the pairing by -(1/2) E|<p_a - p_b, nu>| phi^2 per unit length,
  /// p_a, p_b drawn from the footprint. Returns the compensating term
  /// applied to phi, psi.
  double self_interaction(std::span<const double> phi, std::span<const double> psi) const;
  /// Adds the correction's node-node entries to a column-major matrix with
  /// leading dimension `ld`.
  void add_self_interaction(double* matrix, std::size_t ld) const;

 private:
  struct Sample {
    std::size_t node_a;
    std::size_t node_b;
    double weight_a;  // of the hat function at node_a, times length
    double weight_b;
    std::size_t cells[4];
    double cell_weights[4];
    double spread;  // (1/2) E|<p_a - p_b, nu>| times segment piece length
  };

  Grid grid_;
  std::size_t node_count_;
  std::vector<Sample> samples_;
};

/// w solving -Lap w = phi*H^1|M - (1/|Omega|) int_M phi, with mean(w) = 0.
ScalarField solve_line_source(std::span<const double> phi, const Interface& iface, const Grid& grid,
                              const PoissonOptions& options = {});

/// N(phi, psi) = int_M w_phi psi dH^1, the discrete Green double integral
/// (line-source solve plus the near-field correction).
double nonlocal_pairing(std::span<const double> phi, std::span<const double> psi,
                        const Interface& iface, const Grid& grid);

}  // namespace okstab

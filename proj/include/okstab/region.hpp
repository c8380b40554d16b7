#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>

#include "okstab/domain.hpp"
#include "okstab/field.hpp"
#include "okstab/interface.hpp"

namespace okstab {

/// A full configuration E: interface, container and coupling gamma, with
/// the derived area, mass and (lazily computed) fields u_E and v_E.
///
/// States are immutable. Copies and `with_gamma` share the field cache,
/// since u_E and v_E depend on the geometry only.
class RegionState {
 public:
  RegionState(Interface iface, const DomainSpec& domain, double gamma);
  /// Seeds the potential solve with `potential_guess` (warm start).
  RegionState(Interface iface, const DomainSpec& domain, double gamma,
              const ScalarField& potential_guess);

  const Interface& interface() const { return iface_; }
  const DomainSpec& domain() const { return grid_.spec(); }
  const Grid& grid() const { return grid_; }
  double gamma() const { return gamma_; }
  double area() const { return area_; }
  /// m = 2|E|/|Omega| - 1.
  double mass() const { return 2.0 * area_ / domain().area() - 1.0; }
  double perimeter() const { return perimeter_; }

  /// Exact cell-average indicator u_E.
  const ScalarField& u() const;
  /// u_E tested against cell hat functions; the right-hand side for v_E.
  const ScalarField& source() const;
  const ScalarField& v() const;

  RegionState with_gamma(double gamma) const;
  RegionState with_interface(Interface iface) const;

 private:
  struct Cache {
    std::once_flag once;
    std::optional<ScalarField> u;
    std::optional<ScalarField> source;
    std::optional<ScalarField> v;
    std::optional<ScalarField> guess;
  };
  void ensure_fields() const;

  Interface iface_;
  Grid grid_;
  double gamma_;
  double area_;
  double perimeter_;
  std::shared_ptr<Cache> cache_;
};

ScalarField rasterize_indicator(const RegionState& state);

/// Normal graph map x -> x + phi(x) nu_M(x), chord endpoints re-projected
/// onto their wall, resampled to the same node count. With `fix_volume`, a
/// constant c is added to phi (found by bisection) so the new area equals
/// `target_area` to within 1e-10*|Omega|.
Interface normal_graph_perturb(const Interface& iface, const DomainSpec& domain,
                               std::span<const double> phi, bool fix_volume, double target_area,
                               double* shift_out = nullptr);

Interface normal_graph_perturb(const RegionState& state, std::span<const double> phi, bool fix_volume,
                               double* shift_out = nullptr);

}  // namespace okstab

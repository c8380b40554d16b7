#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "okstab/vec2.hpp"

namespace okstab {

enum class DomainKind { rectangle, torus };

/// Walls of a rectangle, listed in counter-clockwise order starting at y = 0.
enum class Wall { bottom, right, top, left };

/// The container: a rectangle [0,lx]x[0,ly] with Neumann walls or the flat
/// torus of the same size, together with its cell-centred grid resolution.
struct DomainSpec {
  DomainKind kind = DomainKind::rectangle;
  double lx = 1.0;
  double ly = 1.0;
  int nx = 64;
  int ny = 64;
  // Interface endpoints must stay this far from every corner. A value of 0
  // selects the minimum admissible margin, 2*max(hx, hy).
  double corner_margin = 0.0;
  // Test hook: when set, every admissible wall point reports this constant
  // boundary curvature instead of the flat-edge value 0.
  std::optional<double> mock_boundary_curvature;

  static constexpr int min_cells = 16;

  static DomainSpec rectangle(double lx, double ly, int nx, int ny);
  static DomainSpec torus(double lx, double ly, int nx, int ny);

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double area() const { return lx * ly; }
  double effective_corner_margin() const;
  bool periodic() const { return kind == DomainKind::torus; }

  /// Throws okstab::Error when an invariant is violated.
  void validate() const;
};

bool same_domain(const DomainSpec& a, const DomainSpec& b);

/// Uniform cell-centred grid over a validated domain. Cells are stored
/// row-major with x fastest: index = j*nx + i.
class Grid {
 public:
  explicit Grid(const DomainSpec& spec);

  const DomainSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double cell_area() const { return hx_ * hy_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(spec_.nx) * spec_.ny; }
  bool periodic() const { return spec_.periodic(); }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * spec_.nx + i; }
  Vec2 center(int i, int j) const { return {(i + 0.5) * hx_, (j + 0.5) * hy_}; }

  /// Periodic wrap of a cell index (valid for any integer input).
  int wrap_i(int i) const { return wrap(i, spec_.nx); }
  int wrap_j(int j) const { return wrap(j, spec_.ny); }

  /// Neighbour of (i,j) offset by (di,dj); wraps on the torus, returns
  /// nullopt outside a rectangle.
  std::optional<std::size_t> neighbor(int i, int j, int di, int dj) const;

 private:
  static int wrap(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
  }

  DomainSpec spec_;
  double hx_;
  double hy_;
};

Grid build_grid(const DomainSpec& spec);

/// Signed curvature of the container boundary at p, positive where the
/// container is locally convex. Flat rectangle edges give 0.
double boundary_curvature(const DomainSpec& spec, Vec2 p);

// Boundary geometry helpers for rectangles.
double boundary_tolerance(const DomainSpec& spec);
std::optional<Wall> wall_of(const DomainSpec& spec, Vec2 p);
Vec2 wall_outward_normal(Wall w);
Vec2 project_to_wall(const DomainSpec& spec, Wall w, Vec2 p);
bool within_corner_margin(const DomainSpec& spec, Vec2 p);
bool strictly_inside(const DomainSpec& spec, Vec2 p);
/// Counter-clockwise arclength parameter of a boundary point, starting at
/// the origin corner.
double boundary_parameter(const DomainSpec& spec, Vec2 p);
std::array<Vec2, 4> corners(const DomainSpec& spec);

}  // namespace okstab

#include "okstab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "okstab/error.hpp"

namespace okstab {

DomainSpec DomainSpec::rectangle(double lx, double ly, int nx, int ny) {
  DomainSpec s;
  s.kind = DomainKind::rectangle;
  s.lx = lx;
  s.ly = ly;
  s.nx = nx;
  s.ny = ny;
  return s;
}

DomainSpec DomainSpec::torus(double lx, double ly, int nx, int ny) {
  DomainSpec s = rectangle(lx, ly, nx, ny);
  s.kind = DomainKind::torus;
  return s;
}

double DomainSpec::effective_corner_margin() const {
  const double minimum = 2.0 * std::max(hx(), hy());
  return corner_margin > 0.0 ? corner_margin : minimum;
}

void DomainSpec::validate() const {
  if (!(lx > 0.0) || !(ly > 0.0)) throw Error("domain", "lengths must be positive");
  if (nx < min_cells || ny < min_cells) {
    throw Error("domain", "grid resolution below minimum (" + std::to_string(min_cells) +
                              " cells per direction)");
  }
  const double ratio = std::max(hx(), hy()) / std::min(hx(), hy());
  if (ratio > 2.0) throw Error("domain", "cell aspect ratio exceeds 2");
  if (kind == DomainKind::rectangle && corner_margin > 0.0 &&
      corner_margin < 2.0 * std::max(hx(), hy())) {
    throw Error("domain", "corner_margin must be at least 2*max(hx, hy)");
  }
}

bool same_domain(const DomainSpec& a, const DomainSpec& b) {
  return a.kind == b.kind && a.lx == b.lx && a.ly == b.ly && a.nx == b.nx && a.ny == b.ny;
}

Grid::Grid(const DomainSpec& spec) : spec_(spec), hx_(spec.hx()), hy_(spec.hy()) {
  spec_.validate();
}

std::optional<std::size_t> Grid::neighbor(int i, int j, int di, int dj) const {
  int ii = i + di;
  int jj = j + dj;
  if (periodic()) return index(wrap_i(ii), wrap_j(jj));
  if (ii < 0 || jj < 0 || ii >= spec_.nx || jj >= spec_.ny) return std::nullopt;
  return index(ii, jj);
}

Grid build_grid(const DomainSpec& spec) { return Grid(spec); }

double boundary_tolerance(const DomainSpec& spec) { return 1e-9 * std::min(spec.lx, spec.ly); }

std::optional<Wall> wall_of(const DomainSpec& spec, Vec2 p) {
  if (spec.periodic()) return std::nullopt;
  const double tol = boundary_tolerance(spec);
  if (p.x < -tol || p.x > spec.lx + tol || p.y < -tol || p.y > spec.ly + tol) return std::nullopt;
  // Closest wall wins; ties at corners resolve in counter-clockwise order.
  const std::array<double, 4> d = {std::abs(p.y), std::abs(p.x - spec.lx), std::abs(p.y - spec.ly),
                                   std::abs(p.x)};
  const auto it = std::min_element(d.begin(), d.end());
  if (*it > tol) return std::nullopt;
  return static_cast<Wall>(it - d.begin());
}

Vec2 wall_outward_normal(Wall w) {
  switch (w) {
    case Wall::bottom: return {0.0, -1.0};
    case Wall::right: return {1.0, 0.0};
    case Wall::top: return {0.0, 1.0};
    case Wall::left: return {-1.0, 0.0};
  }
  return {};
}

Vec2 project_to_wall(const DomainSpec& spec, Wall w, Vec2 p) {
  switch (w) {
    case Wall::bottom: return {p.x, 0.0};
    case Wall::right: return {spec.lx, p.y};
    case Wall::top: return {p.x, spec.ly};
    case Wall::left: return {0.0, p.y};
  }
  return p;
}

std::array<Vec2, 4> corners(const DomainSpec& spec) {
  return {Vec2{0.0, 0.0}, Vec2{spec.lx, 0.0}, Vec2{spec.lx, spec.ly}, Vec2{0.0, spec.ly}};
}

bool within_corner_margin(const DomainSpec& spec, Vec2 p) {
  const double margin = spec.effective_corner_margin();
  for (Vec2 c : corners(spec)) {
    if (distance(p, c) < margin) return true;
  }
  return false;
}

bool strictly_inside(const DomainSpec& spec, Vec2 p) {
  if (spec.periodic()) return p.x > 0.0 && p.x < spec.lx && p.y > 0.0 && p.y < spec.ly;
  const double tol = boundary_tolerance(spec);
  return p.x > tol && p.x < spec.lx - tol && p.y > tol && p.y < spec.ly - tol;
}

double boundary_parameter(const DomainSpec& spec, Vec2 p) {
  const auto w = wall_of(spec, p);
  if (!w) throw Error("domain", "point is not on the boundary");
  switch (*w) {
    case Wall::bottom: return std::clamp(p.x, 0.0, spec.lx);
    case Wall::right: return spec.lx + std::clamp(p.y, 0.0, spec.ly);
    case Wall::top: return spec.lx + spec.ly + (spec.lx - std::clamp(p.x, 0.0, spec.lx));
    case Wall::left: return 2.0 * spec.lx + spec.ly + (spec.ly - std::clamp(p.y, 0.0, spec.ly));
  }
  return 0.0;
}

double boundary_curvature(const DomainSpec& spec, Vec2 p) {
  if (spec.periodic()) throw Error("domain", "no boundary on a torus");
  if (!wall_of(spec, p)) throw Error("domain", "point is not on the boundary");
  if (within_corner_margin(spec, p)) throw Error("domain", "corner proximity");
  if (spec.mock_boundary_curvature) return *spec.mock_boundary_curvature;
  return 0.0;
}

}  // namespace okstab

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "okstab/domain.hpp"
#include "okstab/vec2.hpp"

namespace okstab {

enum class Topology { chord, loop };

/// Polyline representation of the relative boundary M of a phase region E.
///
/// A chord runs from wall to wall of a rectangle; a loop is closed and lies
/// strictly inside the container. The region E lies to the left of the
/// direction of travel when `e_on_left` is set, so the unit normal pointing
/// out of E is the right-hand normal of the tangent (and the left-hand one
/// otherwise).
class Interface {
 public:
  Interface(std::vector<Vec2> nodes, Topology topology, bool e_on_left = true);

  const std::vector<Vec2>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  Topology topology() const { return topology_; }
  bool is_chord() const { return topology_ == Topology::chord; }
  bool e_on_left() const { return e_on_left_; }

  std::size_t segment_count() const { return is_chord() ? nodes_.size() - 1 : nodes_.size(); }
  Vec2 segment_start(std::size_t k) const { return nodes_[k]; }
  Vec2 segment_end(std::size_t k) const { return nodes_[(k + 1) % nodes_.size()]; }
  double segment_length(std::size_t k) const { return distance(segment_start(k), segment_end(k)); }
  double perimeter() const;

  /// Cumulative arclength at each node (0 at the first node).
  std::vector<double> arclength() const;
  /// Unit tangents along the direction of travel.
  std::vector<Vec2> tangents() const;
  /// Unit normals pointing out of E.
  std::vector<Vec2> normals() const;

  /// The same region described with reversed node order.
  Interface reversed() const;

 private:
  std::vector<Vec2> nodes_;
  Topology topology_;
  bool e_on_left_;
};

/// Throws okstab::Error unless the interface satisfies the node-count,
/// boundary-contact, containment and simplicity invariants in `domain`.
void validate_interface(const Interface& iface, const DomainSpec& domain);

/// True when no two non-adjacent segments intersect.
bool is_simple(const Interface& iface);

Interface resample(const Interface& iface, double h_target);
Interface resample_to_count(const Interface& iface, std::size_t node_count);

/// Signed curvature H_M per node; positive where E is locally convex.
std::vector<double> curvature(const Interface& iface);
/// Curvature with chord endpoints evaluated through a node mirrored across
/// the wall, so a chord meeting a wall obliquely reports curvature there.
std::vector<double> curvature_with_wall_ghosts(const Interface& iface, const DomainSpec& domain);
/// |B_M|^2 per node; in the plane this is H_M^2.
std::vector<double> second_fundamental_squared(const Interface& iface);

/// Trapezoid quadrature weights for the arclength measure on M.
std::vector<double> quadrature_weights(const Interface& iface);

/// Closed polygon of E. For chords the polyline is closed up along the
/// container boundary. When `complement` is set, E is the container minus
/// the polygon (a loop with E outside it).
struct RegionPolygon {
  std::vector<Vec2> ring;  // counter-clockwise, not repeated at the end
  bool complement = false;
};

RegionPolygon region_polygon(const Interface& iface, const DomainSpec& domain);
double signed_area(std::span<const Vec2> ring);

struct Measures {
  double perimeter = 0.0;
  double area = 0.0;
};

Measures measures(const Interface& iface, const DomainSpec& domain);

/// Angle (radians) between the outward co-normal at each chord endpoint and
/// the wall normal; zero when M meets the wall at a right angle.
std::array<double, 2> orthogonality_residual(const Interface& iface, const DomainSpec& domain);

// Factories for the standard configurations.
Interface make_lamella(const DomainSpec& domain, double a, std::size_t node_count);
Interface make_chord(const DomainSpec& domain, Vec2 from, Vec2 to, std::size_t node_count);
Interface make_circle(Vec2 center, double radius, std::size_t node_count, bool e_inside = true);

}  // namespace okstab

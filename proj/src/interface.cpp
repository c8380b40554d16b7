#include "okstab/interface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "okstab/error.hpp"

namespace okstab {

namespace {

constexpr std::size_t min_nodes = 16;

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

double menger_curvature(Vec2 a, Vec2 b, Vec2 c) {
  const double ab = distance(a, b);
  const double bc = distance(b, c);
  const double ac = distance(a, c);
  if (ab == 0.0 || bc == 0.0 || ac == 0.0) {
    throw Error("interface", "repeated node in curvature stencil");
  }
  return 2.0 * cross(b - a, c - b) / (ab * bc * ac);
}

// One-sided second-order curvature at p0 from four consecutive nodes.
double one_sided_curvature(Vec2 p0, Vec2 p1, Vec2 p2, Vec2 p3) {
  const double h = (distance(p0, p1) + distance(p1, p2) + distance(p2, p3)) / 3.0;
  if (h == 0.0) throw Error("interface", "repeated node in curvature stencil");
  const Vec2 d1 = (1.0 / (2.0 * h)) * (-3.0 * p0 + 4.0 * p1 - p2);
  const Vec2 d2 = (1.0 / (h * h)) * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3);
  const double speed = norm(d1);
  return cross(d1, d2) / (speed * speed * speed);
}

}  // namespace

Interface::Interface(std::vector<Vec2> nodes, Topology topology, bool e_on_left)
    : nodes_(std::move(nodes)), topology_(topology), e_on_left_(e_on_left) {
  if (nodes_.size() < 2) throw Error("interface", "an interface needs at least two nodes");
}

double Interface::perimeter() const {
  double p = 0.0;
  for (std::size_t k = 0; k < segment_count(); ++k) p += segment_length(k);
  return p;
}

std::vector<double> Interface::arclength() const {
  std::vector<double> s(nodes_.size(), 0.0);
  for (std::size_t k = 1; k < nodes_.size(); ++k) s[k] = s[k - 1] + distance(nodes_[k - 1], nodes_[k]);
  return s;
}

std::vector<Vec2> Interface::tangents() const {
  const std::size_t n = nodes_.size();
  std::vector<Vec2> t(n);
  if (is_chord()) {
    if (n < 3) {
      const Vec2 d = normalized(nodes_[1] - nodes_[0]);
      std::fill(t.begin(), t.end(), d);
      return t;
    }
    t[0] = normalized(-3.0 * nodes_[0] + 4.0 * nodes_[1] - nodes_[2]);
    t[n - 1] = normalized(3.0 * nodes_[n - 1] - 4.0 * nodes_[n - 2] + nodes_[n - 3]);
    for (std::size_t i = 1; i + 1 < n; ++i) t[i] = normalized(nodes_[i + 1] - nodes_[i - 1]);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = normalized(nodes_[(i + 1) % n] - nodes_[(i + n - 1) % n]);
    }
  }
  return t;
}

std::vector<Vec2> Interface::normals() const {
  std::vector<Vec2> nu = tangents();
  for (Vec2& v : nu) v = e_on_left_ ? right_normal(v) : -right_normal(v);
  return nu;
}

Interface Interface::reversed() const {
  std::vector<Vec2> r(nodes_.rbegin(), nodes_.rend());
  return Interface(std::move(r), topology_, !e_on_left_);
}

bool is_simple(const Interface& iface) {
  const std::size_t m = iface.segment_count();
  const bool closed = !iface.is_chord();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const bool adjacent = b == a + 1 || (closed && a == 0 && b == m - 1);
      if (adjacent) {
        // Adjacent segments only share their common node; a fold-back
        // onto the previous segment still counts as an intersection.
        const Vec2 shared = b == a + 1 ? iface.segment_end(a) : iface.segment_start(a);
        const Vec2 pa = b == a + 1 ? iface.segment_start(a) : iface.segment_end(a);
        const Vec2 pb = b == a + 1 ? iface.segment_end(b) : iface.segment_start(b);
        if (orientation(pa, shared, pb) == 0 && dot(pa - shared, pb - shared) > 0.0) return false;
        continue;
      }
      if (segments_intersect(iface.segment_start(a), iface.segment_end(a), iface.segment_start(b),
                             iface.segment_end(b))) {
        return false;
      }
    }
  }
  return true;
}

void validate_interface(const Interface& iface, const DomainSpec& domain) {
  if (iface.size() < min_nodes) {
    throw Error("interface", "node count " + std::to_string(iface.size()) + " below minimum " +
                                 std::to_string(min_nodes));
  }
  for (std::size_t k = 0; k < iface.segment_count(); ++k) {
    if (iface.segment_length(k) == 0.0) throw Error("interface", "zero-length segment");
  }
  const auto& x = iface.nodes();
  if (iface.is_chord()) {
    if (domain.periodic()) throw Error("interface", "chords require a bounded container");
    const double tol = 1e-8 * std::min(domain.lx, domain.ly);
    for (Vec2 end : {x.front(), x.back()}) {
      const double d = std::min({std::abs(end.x), std::abs(end.x - domain.lx), std::abs(end.y),
                                 std::abs(end.y - domain.ly)});
      const bool inside_box = end.x >= -tol && end.x <= domain.lx + tol && end.y >= -tol &&
                              end.y <= domain.ly + tol;
      if (d > tol || !inside_box) throw Error("interface", "chord endpoint is not on the boundary");
      if (within_corner_margin(domain, end)) throw Error("interface", "corner proximity");
    }
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      if (!strictly_inside(domain, x[i])) throw Error("interface", "interior node outside container");
    }
  } else {
    for (Vec2 p : x) {
      if (!strictly_inside(domain, p)) throw Error("interface", "loop node outside container");
    }
  }
  if (!is_simple(iface)) throw Error("interface", "self-intersecting polyline");
}

Interface resample_to_count(const Interface& iface, std::size_t node_count) {
  const double total = iface.perimeter();
  if (!(total > 0.0)) throw Error("interface", "degenerate (zero-length) interface");
  const bool chord = iface.is_chord();
  const std::size_t segments = chord ? node_count - 1 : node_count;
  if (segments < 1) throw Error("interface", "resampling needs at least one segment");
  const std::size_t m = iface.segment_count();

  std::vector<Vec2> out;
  out.reserve(node_count);
  out.push_back(iface.nodes().front());
  std::size_t seg = 0;
  double seg_begin = 0.0;
  double seg_len = iface.segment_length(0);
  for (std::size_t q = 1; q < segments; ++q) {
    const double target = total * static_cast<double>(q) / static_cast<double>(segments);
    while (seg + 1 < m && seg_begin + seg_len < target) {
      seg_begin += seg_len;
      ++seg;
      seg_len = iface.segment_length(seg);
    }
    const double t = seg_len > 0.0 ? std::clamp((target - seg_begin) / seg_len, 0.0, 1.0) : 0.0;
    const Vec2 a = iface.segment_start(seg);
    const Vec2 b = iface.segment_end(seg);
    out.push_back(a + t * (b - a));
  }
  if (chord) out.push_back(iface.nodes().back());
  return Interface(std::move(out), iface.topology(), iface.e_on_left());
}

Interface resample(const Interface& iface, double h_target) {
  const double total = iface.perimeter();
  if (!(total > 0.0)) throw Error("interface", "degenerate (zero-length) interface");
  if (!(h_target > 0.0) || h_target > total / 16.0) {
    throw Error("interface", "h_target must lie in (0, perimeter/16]");
  }
  const auto segments = static_cast<std::size_t>(std::max(1.0, std::round(total / h_target)));
  return resample_to_count(iface, iface.is_chord() ? segments + 1 : segments);
}

std::vector<double> curvature(const Interface& iface) {
  const auto& x = iface.nodes();
  const std::size_t n = x.size();
  if (n < 4) throw Error("interface", "curvature needs at least four nodes");
  std::vector<double> k(n);
  if (iface.is_chord()) {
    for (std::size_t i = 1; i + 1 < n; ++i) k[i] = menger_curvature(x[i - 1], x[i], x[i + 1]);
    k[0] = one_sided_curvature(x[0], x[1], x[2], x[3]);
    // Reversing the traversal flips the sign of the one-sided estimate.
    k[n - 1] = -one_sided_curvature(x[n - 1], x[n - 2], x[n - 3], x[n - 4]);
  } else {
    for (std::size_t i = 0; i < n; ++i) k[i] = menger_curvature(x[(i + n - 1) % n], x[i], x[(i + 1) % n]);
  }
  if (!iface.e_on_left()) {
    for (double& v : k) v = -v;
  }
  return k;
}

std::vector<double> curvature_with_wall_ghosts(const Interface& iface, const DomainSpec& domain) {
  std::vector<double> k = curvature(iface);
  if (!iface.is_chord()) return k;
  const auto& x = iface.nodes();
  const std::size_t n = x.size();
  auto ghost = [&](Vec2 end, Vec2 next) {
    const auto w = wall_of(domain, end);
    if (!w) throw Error("interface", "chord endpoint is not on the boundary");
    const Vec2 nrm = wall_outward_normal(*w);
    return next - 2.0 * dot(next - end, nrm) * nrm;
  };
  const double sign = iface.e_on_left() ? 1.0 : -1.0;
  k[0] = sign * menger_curvature(ghost(x[0], x[1]), x[0], x[1]);
  k[n - 1] = sign * menger_curvature(x[n - 2], x[n - 1], ghost(x[n - 1], x[n - 2]));
  return k;
}

std::vector<double> second_fundamental_squared(const Interface& iface) {
  std::vector<double> h = curvature(iface);
  for (double& v : h) v *= v;
  return h;
}

std::vector<double> quadrature_weights(const Interface& iface) {
  const std::size_t n = iface.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 0; k < iface.segment_count(); ++k) {
    const double half = 0.5 * iface.segment_length(k);
    w[k] += half;
    w[(k + 1) % n] += half;
  }
  return w;
}

double signed_area(std::span<const Vec2> ring) {
  double a = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * a;
}

RegionPolygon region_polygon(const Interface& iface, const DomainSpec& domain) {
  RegionPolygon poly;
  if (!iface.is_chord()) {
    poly.ring = iface.nodes();
    const bool ccw = signed_area(poly.ring) > 0.0;
    // E is on the left: the bounded interior for a ccw loop.
    poly.complement = ccw != iface.e_on_left();
    if (!ccw) std::reverse(poly.ring.begin(), poly.ring.end());
    return poly;
  }
  if (domain.periodic()) throw Error("interface", "chords require a bounded container");
  const Interface oriented = iface.e_on_left() ? iface : iface.reversed();
  poly.ring = oriented.nodes();
  const double total = 2.0 * (domain.lx + domain.ly);
  const double s_end = boundary_parameter(domain, poly.ring.back());
  const double s_start = boundary_parameter(domain, poly.ring.front());
  auto ccw_offset = [&](double s) {
    const double d = std::fmod(s - s_end + total, total);
    return d;
  };
  const double stop = ccw_offset(s_start);
  const auto c = corners(domain);
  const std::array<double, 4> corner_s = {0.0, domain.lx, domain.lx + domain.ly,
                                          2.0 * domain.lx + domain.ly};
  std::vector<std::pair<double, Vec2>> walk;
  for (int q = 0; q < 4; ++q) {
    const double d = ccw_offset(corner_s[q]);
    if (d > 0.0 && d < stop) walk.emplace_back(d, c[q]);
  }
  std::sort(walk.begin(), walk.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [d, p] : walk) poly.ring.push_back(p);
  return poly;
}

Measures measures(const Interface& iface, const DomainSpec& domain) {
  if (!is_simple(iface)) throw Error("interface", "non-simple polygon");
  const RegionPolygon poly = region_polygon(iface, domain);
  const double ring_area = signed_area(poly.ring);
  return {iface.perimeter(), poly.complement ? domain.area() - ring_area : ring_area};
}

std::array<double, 2> orthogonality_residual(const Interface& iface, const DomainSpec& domain) {
  if (!iface.is_chord()) throw Error("interface", "no boundary intersection");
  const auto t = iface.tangents();
  const auto& x = iface.nodes();
  std::array<double, 2> r{};
  const std::array<Vec2, 2> conormal = {-t.front(), t.back()};
  const std::array<Vec2, 2> ends = {x.front(), x.back()};
  for (int e = 0; e < 2; ++e) {
    const auto w = wall_of(domain, ends[e]);
    if (!w) throw Error("interface", "chord endpoint is not on the boundary");
    const Vec2 n = wall_outward_normal(*w);
    const Vec2 tau = right_normal(n);
    r[e] = std::atan2(std::abs(dot(conormal[e], tau)), std::abs(dot(conormal[e], n)));
  }
  return r;
}

Interface make_lamella(const DomainSpec& domain, double a, std::size_t node_count) {
  return make_chord(domain, {a, 0.0}, {a, domain.ly}, node_count);
}

Interface make_chord(const DomainSpec&, Vec2 from, Vec2 to, std::size_t node_count) {
  if (node_count < 2) throw Error("interface", "a chord needs at least two nodes");
  std::vector<Vec2> x(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(node_count - 1);
    x[i] = from + t * (to - from);
  }
  x.back() = to;
  return Interface(std::move(x), Topology::chord, true);
}

Interface make_circle(Vec2 center, double radius, std::size_t node_count, bool e_inside) {
  std::vector<Vec2> x(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(node_count);
    x[i] = center + radius * Vec2{std::cos(th), std::sin(th)};
  }
  return Interface(std::move(x), Topology::loop, e_inside);
}

}  // namespace okstab

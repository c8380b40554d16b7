#include "okstab/energy.hpp"

#include <algorithm>
#include <cmath>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include "okstab/error.hpp"

namespace okstab {

EnergyParts energy_parts(const RegionState& state) {
  EnergyParts e;
  e.P = state.perimeter();
  e.NL = state.gamma() == 0.0 ? 0.0 : state.gamma() * dirichlet_energy(state.v());
  e.J = e.P + e.NL;
  return e;
}

double total_energy(const RegionState& state) { return energy_parts(state).J; }

std::vector<double> first_variation_density(const RegionState& state) {
  std::vector<double> d = curvature(state.interface());
  if (state.gamma() != 0.0) {
    const std::vector<double> v = trace_on_curve(state.v(), state.interface());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += 4.0 * state.gamma() * v[i];
  }
  return d;
}

CriticalityReport criticality(const RegionState& state) {
  CriticalityReport r;
  const EnergyParts e = energy_parts(state);
  r.J = e.J;
  r.P = e.P;
  r.NL = e.NL;
  const std::vector<double> density = first_variation_density(state);
  const std::vector<double> w = quadrature_weights(state.interface());
  double total_w = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total_w += w[i];
    acc += w[i] * density[i];
  }
  r.lambda = acc / total_w;
  r.residual.resize(density.size());
  double l2 = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    r.residual[i] = density[i] - r.lambda;
    r.residual_sup = std::max(r.residual_sup, std::abs(r.residual[i]));
    l2 += w[i] * r.residual[i] * r.residual[i];
  }
  r.residual_l2 = std::sqrt(l2);
  if (state.interface().is_chord()) {
    const auto o = orthogonality_residual(state.interface(), state.domain());
    r.ortho_residual = {o[0], o[1]};
  }
  return r;
}

namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, false, true>;  // counter-clockwise, closed
using BgMulti = bg::model::multi_polygon<BgPolygon>;

BgPolygon to_boost(const RegionPolygon& poly) {
  BgPolygon out;
  for (Vec2 p : poly.ring) out.outer().emplace_back(p.x, p.y);
  out.outer().emplace_back(poly.ring.front().x, poly.ring.front().y);
  bg::correct(out);
  return out;
}

double pixel_count_difference(const RegionPolygon& a, const RegionPolygon& b, const DomainSpec& domain) {
  DomainSpec fine = domain;
  fine.nx *= 4;
  fine.ny *= 4;
  const Grid g(fine);
  const std::vector<double> fa = cell_fractions(a, g);
  const std::vector<double> fb = cell_fractions(b, g);
  double s = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) s += std::abs(fa[i] - fb[i]);
  return s * g.cell_area();
}

}  // namespace

double symmetric_difference_area(const Interface& e, const Interface& f, const DomainSpec& domain) {
  const RegionPolygon pe = region_polygon(e, domain);
  const RegionPolygon pf = region_polygon(f, domain);
  try {
    const BgPolygon be = to_boost(pe);
    const BgPolygon bf = to_boost(pf);
    if (!bg::is_valid(be) || !bg::is_valid(bf)) return pixel_count_difference(pe, pf, domain);
    BgMulti diff;
    bg::sym_difference(be, bf, diff);
    const double ring_diff = bg::area(diff);
    // (Ω\A) △ B = Ω \ (A △ B); complementing both sides leaves A △ B.
    if (pe.complement != pf.complement) return domain.area() - ring_diff;
    return ring_diff;
  } catch (const bg::exception&) {
    return pixel_count_difference(pe, pf, domain);
  }
}

LipschitzGap lipschitz_gap(const RegionState& e, const RegionState& f) {
  if (!same_domain(e.domain(), f.domain()) || e.gamma() != f.gamma()) {
    throw Error("energy", "mismatched domains");
  }
  LipschitzGap g;
  g.nonlocal_gap = std::abs(energy_parts(f).NL - energy_parts(e).NL);
  g.symmetric_difference = symmetric_difference_area(e.interface(), f.interface(), e.domain());
  return g;
}

}  // namespace okstab

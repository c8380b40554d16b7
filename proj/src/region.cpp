#include "okstab/region.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "okstab/error.hpp"

namespace okstab {

RegionState::RegionState(Interface iface, const DomainSpec& domain, double gamma)
    : iface_(std::move(iface)), grid_(domain), gamma_(gamma), cache_(std::make_shared<Cache>()) {
  if (!(gamma >= 0.0)) throw Error("interface", "gamma must be non-negative");
  validate_interface(iface_, domain);
  const Measures m = measures(iface_, domain);
  area_ = m.area;
  perimeter_ = m.perimeter;
  if (!(area_ > 0.0 && area_ < domain.area())) {
    throw Error("interface", "region area must lie strictly between 0 and |Omega|");
  }
}

RegionState::RegionState(Interface iface, const DomainSpec& domain, double gamma,
                         const ScalarField& potential_guess)
    : RegionState(std::move(iface), domain, gamma) {
  cache_->guess = potential_guess;
}

void RegionState::ensure_fields() const {
  std::call_once(cache_->once, [this] {
    cache_->u = rasterize_indicator(iface_, grid_);
    cache_->source = hat_indicator(iface_, grid_);
    PoissonOptions opts;
    if (cache_->guess && same_domain(cache_->guess->grid().spec(), grid_.spec())) {
      opts.initial_guess = &*cache_->guess;
    }
    cache_->v = solve_potential(*cache_->source, opts);
    cache_->guess.reset();
  });
}

const ScalarField& RegionState::u() const {
  ensure_fields();
  return *cache_->u;
}

const ScalarField& RegionState::source() const {
  ensure_fields();
  return *cache_->source;
}

const ScalarField& RegionState::v() const {
  ensure_fields();
  return *cache_->v;
}

RegionState RegionState::with_gamma(double gamma) const {
  if (!(gamma >= 0.0)) throw Error("interface", "gamma must be non-negative");
  RegionState s = *this;
  s.gamma_ = gamma;
  return s;
}

RegionState RegionState::with_interface(Interface iface) const {
  return RegionState(std::move(iface), domain(), gamma_);
}

ScalarField rasterize_indicator(const RegionState& state) { return state.u(); }

namespace {

Interface displace(const Interface& iface, const DomainSpec& domain, const std::vector<Vec2>& normals,
                   std::span<const double> phi, double shift) {
  std::vector<Vec2> x = iface.nodes();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] + (phi[i] + shift) * normals[i];
  if (iface.is_chord()) {
    for (std::size_t e : {std::size_t{0}, x.size() - 1}) {
      const auto wall = wall_of(domain, iface.nodes()[e]);
      if (!wall) throw Error("interface", "chord endpoint is not on the boundary");
      const Vec2 p = project_to_wall(domain, *wall, x[e]);
      const bool on_segment = p.x >= 0.0 && p.x <= domain.lx && p.y >= 0.0 && p.y <= domain.ly;
      if (!on_segment) throw Error("interface", "endpoint leaves its wall segment");
      if (within_corner_margin(domain, p)) throw Error("interface", "corner proximity");
      x[e] = p;
    }
  }
  return resample_to_count(Interface(std::move(x), iface.topology(), iface.e_on_left()), iface.size());
}

double region_area(const Interface& iface, const DomainSpec& domain) {
  const RegionPolygon poly = region_polygon(iface, domain);
  const double a = signed_area(poly.ring);
  return poly.complement ? domain.area() - a : a;
}

}  // namespace

Interface normal_graph_perturb(const Interface& iface, const DomainSpec& domain,
                               std::span<const double> phi, bool fix_volume, double target_area,
                               double* shift_out) {
  if (phi.size() != iface.size()) throw Error("interface", "phi size does not match interface");
  const std::vector<double> h = curvature(iface);
  double h_max = 0.0;
  double phi_max = 0.0;
  for (double v : h) h_max = std::max(h_max, std::abs(v));
  for (double v : phi) phi_max = std::max(phi_max, std::abs(v));
  if (h_max > 0.0 && phi_max > 0.25 / h_max) {
    throw Error("interface", "perturbation amplitude exceeds the graph-injectivity bound");
  }
  const std::vector<Vec2> normals = iface.normals();
  double shift = 0.0;
  if (fix_volume) {
    const double tol = 1e-10 * domain.area();
    auto excess = [&](double c) { return region_area(displace(iface, domain, normals, phi, c), domain) - target_area; };
    // Area grows with the shift (the normal points out of E).
    double lo = -phi_max;
    double hi = -phi_max;
    double f_lo = excess(lo);
    double step = std::max(phi_max, 1e-6 * std::min(domain.lx, domain.ly));
    for (int expand = 0; f_lo > 0.0; ++expand) {
      if (expand == 60) throw Error("interface", "volume fix could not bracket the target area");
      lo -= step;
      step *= 2.0;
      f_lo = excess(lo);
    }
    hi = phi_max;
    double f_hi = excess(hi);
    step = std::max(phi_max, 1e-6 * std::min(domain.lx, domain.ly));
    for (int expand = 0; f_hi < 0.0; ++expand) {
      if (expand == 60) throw Error("interface", "volume fix could not bracket the target area");
      hi += step;
      step *= 2.0;
      f_hi = excess(hi);
    }
    shift = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = excess(shift);
      if (std::abs(f) <= 0.01 * tol || hi - lo <= 1e-17) break;
      if (f > 0.0) {
        hi = shift;
      } else {
        lo = shift;
      }
      shift = 0.5 * (lo + hi);
    }
    if (std::abs(excess(shift)) > tol) throw Error("interface", "volume fix did not converge");
  }
  Interface out = displace(iface, domain, normals, phi, shift);
  if (!is_simple(out)) throw Error("interface", "self-intersection after perturbation");
  if (shift_out) *shift_out = shift;
  return out;
}

Interface normal_graph_perturb(const RegionState& state, std::span<const double> phi, bool fix_volume,
                               double* shift_out) {
  return normal_graph_perturb(state.interface(), state.domain(), phi, fix_volume, state.area(),
                              shift_out);
}

}  // namespace okstab

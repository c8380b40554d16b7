#include "okstab/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "okstab/energy.hpp"
#include "okstab/error.hpp"

namespace okstab {

namespace {

double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double weighted_mean(std::span<const double> f, std::span<const double> w) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += w[i] * f[i];
    den += w[i];
  }
  return num / den;
}

std::vector<double> flow_velocity(const RegionState& state) {
  const Interface& iface = state.interface();
  std::vector<double> d = curvature_with_wall_ghosts(iface, state.domain());
  if (state.gamma() != 0.0) {
    const std::vector<double> v = trace_on_curve(state.v(), iface);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += 4.0 * state.gamma() * v[i];
  }
  const std::vector<double> w = quadrature_weights(iface);
  const double lambda = weighted_mean(d, w);
  for (double& x : d) x = -(x - lambda);
  return d;
}

FlowStep describe(const RegionState& state, int step, double t, double dt, double J, int halvings) {
  const CriticalityReport c = criticality(state);
  FlowStep s;
  s.step = step;
  s.t = t;
  s.dt = dt;
  s.J = J;
  s.residual_sup = c.residual_sup;
  s.area = state.area();
  for (double o : c.ortho_residual) s.ortho_max = std::max(s.ortho_max, o);
  s.halvings = halvings;
  return s;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out[i] = lo * std::pow(hi / lo, f);
  }
  return out;
}

double max_curvature(const Interface& iface) {
  double m = 0.0;
  for (double k : curvature(iface)) m = std::max(m, std::abs(k));
  return m;
}

// One volume-fixed perturbation of E, resampled on rejection. Returns the
// perturbed interface and counts rejections.
Interface perturb_with_retries(const RegionState& state, double amplitude, std::mt19937_64& rng,
                               int max_rejections, int& rejections) {
  rejections = 0;
  for (;;) {
    try {
      const std::vector<double> phi = random_normal_profile(state.interface(), amplitude, rng);
      Interface f = normal_graph_perturb(state, phi, true);
      validate_interface(f, state.domain());
      return f;
    } catch (const Error& e) {
      if (++rejections >= max_rejections) {
        std::ostringstream msg;
        msg << "perturbation rejected " << rejections << " times at amplitude " << amplitude << " ("
            << e.what() << ")";
        throw Error("probe", msg.str());
      }
    }
  }
}

}  // namespace

double flow_step_bound(const RegionState& state) {
  const Interface& iface = state.interface();
  const double h = iface.perimeter() / static_cast<double>(iface.segment_count());
  double hmax = 0.0;
  for (double k : curvature_with_wall_ghosts(iface, state.domain())) hmax = std::max(hmax, std::abs(k));
  return 0.4 * h * h / std::max(1.0, hmax);
}

FlowResult volume_preserving_flow(const RegionState& state, const FlowOptions& options) {
  if (!(options.dt > 0.0) || options.steps < 0) throw Error("probe", "flow needs dt > 0 and steps >= 0");
  const double bound = flow_step_bound(state);
  if (options.dt > bound) {
    std::ostringstream msg;
    msg << "time step " << options.dt << " exceeds the stability bound " << bound;
    throw Error("probe", msg.str());
  }
  const DomainSpec& domain = state.domain();
  const double target = state.area();
  RegionState cur = state;
  double J = total_energy(cur);
  double t = 0.0;
  FlowResult out{cur, {}, {cur.interface()}};
  out.log.push_back(describe(cur, 0, t, 0.0, J, 0));

  for (int step = 1; step <= options.steps; ++step) {
    const std::vector<double> vel = flow_velocity(cur);
    double dt = options.dt;
    int halvings = 0;
    for (;;) {
      std::vector<double> phi(vel.size());
      for (std::size_t i = 0; i < vel.size(); ++i) phi[i] = dt * vel[i];
      Interface moved = normal_graph_perturb(cur.interface(), domain, phi, true, target);
      RegionState next(std::move(moved), domain, cur.gamma(), cur.v());
      const double jn = total_energy(next);
      if (jn <= J + options.tolerance * std::abs(J)) {
        cur = next;
        J = jn;
        break;
      }
      if (++halvings > options.max_halvings) {
        throw Error("probe", "time step underflow: energy still increases after repeated halving");
      }
      dt *= 0.5;
    }
    t += dt;
    out.log.push_back(describe(cur, step, t, dt, J, halvings));
    if (options.snapshot_every > 0 && step % options.snapshot_every == 0 && step != options.steps) {
      out.snapshots.push_back(cur.interface());
    }
  }
  out.snapshots.push_back(cur.interface());
  out.final_state = cur;
  return out;
}

std::vector<double> random_normal_profile(const Interface& iface, double amplitude, std::mt19937_64& rng) {
  constexpr int modes = 8;
  const std::vector<double> s = iface.arclength();
  const double L = iface.perimeter();
  const std::size_t n = iface.size();
  std::vector<double> phi(n, 0.0);
  for (int k = 1; k <= modes; ++k) {
    const double ck = uniform_pm1(rng) / (k * k);
    if (iface.is_chord()) {
      for (std::size_t i = 0; i < n; ++i) phi[i] += ck * std::cos(k * std::numbers::pi * s[i] / L);
    } else {
      const double sk = uniform_pm1(rng) / (k * k);
      for (std::size_t i = 0; i < n; ++i) {
        const double th = 2.0 * std::numbers::pi * k * s[i] / L;
        phi[i] += ck * std::cos(th) + sk * std::sin(th);
      }
    }
  }
  const std::vector<double> w = quadrature_weights(iface);
  const double mean = weighted_mean(phi, w);
  double peak = 0.0;
  for (double& x : phi) {
    x -= mean;
    peak = std::max(peak, std::abs(x));
  }
  if (peak == 0.0) throw Error("probe", "degenerate random profile");
  for (double& x : phi) x *= amplitude / peak;
  return phi;
}

ProbeReport minimality_probe(const RegionState& state, int n, std::span<const double> amplitudes,
                             std::uint64_t seed, const ProbeOptions& options) {
  if (n < 50) throw Error("probe", "minimality probe needs at least 50 samples");
  if (amplitudes.empty()) throw Error("probe", "no amplitudes given");
  const CriticalityReport crit = criticality(state);
  if (!(crit.residual_sup < options.critical_tolerance)) {
    std::ostringstream msg;
    msg << "state is not critical (residual_sup " << crit.residual_sup << ")";
    throw Error("probe", msg.str());
  }
  const double j0 = crit.J;
  const double p0 = state.perimeter();
  std::mt19937_64 rng(seed);

  ProbeReport r;
  r.seed = seed;
  r.min_ratio = INFINITY;
  r.lambda_ratio_max = -INFINITY;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    ProbeSample s;
    s.amplitude = amplitudes[static_cast<std::size_t>(i) % amplitudes.size()];
    Interface f = perturb_with_retries(state, s.amplitude, rng, options.max_rejections, s.rejections);
    RegionState sf(std::move(f), state.domain(), state.gamma(), state.v());
    s.delta_j = total_energy(sf) - j0;
    s.perimeter_drop = p0 - sf.perimeter();
    s.symmetric_difference = symmetric_difference_area(state.interface(), sf.interface(), state.domain());
    if (!(s.symmetric_difference > 0.0)) throw Error("probe", "perturbation did not change the set");
    const double d2 = s.symmetric_difference * s.symmetric_difference;
    num += s.delta_j * d2;
    den += d2 * d2;
    r.min_ratio = std::min(r.min_ratio, s.delta_j / d2);
    r.lambda_ratio_max = std::max(r.lambda_ratio_max, s.perimeter_drop / s.symmetric_difference);
    if (s.delta_j < 0.0) ++r.negative_count;
    r.samples.push_back(s);
  }
  r.fitted_c = num / den;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (const ProbeSample& s : r.samples) {
    if (s.delta_j <= 0.0) continue;
    const double x = std::log(s.amplitude);
    const double y = std::log(s.delta_j);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  const double var = m * sxx - sx * sx;
  r.slope = m >= 2 && var > 0.0 ? (m * sxy - sx * sy) / var : NAN;
  return r;
}

LambdaReport lambda_minimality_check(const RegionState& state, int n, std::uint64_t seed) {
  if (n < 1) throw Error("probe", "lambda check needs at least one sample");
  constexpr int gross = 10;
  const std::vector<double> amps = log_spaced(1e-3, 5e-2, 10);
  const double hmax = max_curvature(state.interface());
  double gross_amp = 0.2;
  if (hmax > 0.0) gross_amp = std::min(gross_amp, 0.9 * 0.25 / hmax);
  const double p0 = state.perimeter();
  std::mt19937_64 rng(seed);

  LambdaReport r;
  r.ratio_max = -INFINITY;
  for (int i = 0; i < n + gross; ++i) {
    ProbeSample s;
    s.amplitude = i < n ? amps[static_cast<std::size_t>(i) % amps.size()] : gross_amp;
    const Interface g = perturb_with_retries(state, s.amplitude, rng, 10, s.rejections);
    s.perimeter_drop = p0 - g.perimeter();
    s.symmetric_difference = symmetric_difference_area(state.interface(), g, state.domain());
    if (!(s.symmetric_difference > 0.0)) throw Error("probe", "perturbation did not change the set");
    r.ratio_max = std::max(r.ratio_max, s.perimeter_drop / s.symmetric_difference);
    r.samples.push_back(s);
  }
  return r;
}

std::vector<LipschitzSample> lipschitz_ratios(const RegionState& state, std::span<const double> amplitudes,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<double> psi = random_normal_profile(state.interface(), 1.0, rng);
  const double d0 = dirichlet_energy(state.v());
  std::vector<LipschitzSample> out;
  for (double amp : amplitudes) {
    std::vector<double> phi(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) phi[i] = amp * (1.0 + 0.5 * psi[i]);
    Interface f = normal_graph_perturb(state, phi, false);
    RegionState sf(std::move(f), state.domain(), state.gamma(), state.v());
    LipschitzSample s;
    s.amplitude = amp;
    s.symmetric_difference = symmetric_difference_area(state.interface(), sf.interface(), state.domain());
    s.dirichlet_gap = std::abs(dirichlet_energy(sf.v()) - d0);
    s.ratio = s.dirichlet_gap / s.symmetric_difference;
    out.push_back(s);
  }
  return out;
}

GammaSearchResult gamma_threshold_search(double a, int k_max, double tol, const GammaSearchOptions& options) {
  if (!(a > 0.0 && a < 1.0)) throw Error("probe", "lamella fraction must lie in (0, 1)");
  if (!(tol > 0.0)) throw Error("probe", "tolerance must be positive");
  if (!(options.gamma_hi > options.gamma_lo)) throw Error("probe", "empty gamma bracket");
  const DomainSpec domain = DomainSpec::rectangle(1.0, 1.0, options.grid, options.grid);
  const RegionState state(make_lamella(domain, a, options.nodes), domain, options.gamma_lo);
  const QuadraticFormMatrix form = assemble_form(state, AssemblyOptions{k_max});
  auto mu = [&](double g) { return min_eig_zero_mean(form.with_gamma(g)).mu_min; };

  GammaSearchResult r;
  double lo = options.gamma_lo;
  double hi = options.gamma_hi;
  double flo = mu(lo);
  const double fhi = mu(hi);
  if (flo == 0.0 || fhi == 0.0) {
    r.gamma_star = flo == 0.0 ? lo : hi;
    r.bracket_lo = r.bracket_hi = r.gamma_star;
    return r;
  }
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream msg;
    msg << "no sign change of mu_min in [" << lo << ", " << hi << "]";
    throw Error("probe", msg.str());
  }
  double mid = 0.5 * (lo + hi);
  double fmid = mu(mid);
  int it = 1;
  while (std::abs(fmid) > tol && it < options.max_iter && hi - lo > 1e-14 * std::max(1.0, hi)) {
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    fmid = mu(mid);
    ++it;
  }
  r.gamma_star = mid;
  r.mu_at_root = fmid;
  r.iterations = it;
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  return r;
}

}  // namespace okstab

#include "okstab/diffuse.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "okstab/error.hpp"
#include "okstab/simd/kernels.hpp"

namespace okstab {

namespace {

simd::StencilShape shape_of(const Grid& g) {
  return {g.nx(), g.ny(), 1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()), g.periodic()};
}

void check_state(const DiffuseState& ds) {
  if (!(ds.epsilon > 0.0)) throw Error("diffuse", "epsilon must be positive");
  if (!(ds.gamma0 >= 0.0)) throw Error("diffuse", "gamma0 must be non-negative");
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

DiffuseEnergyParts energy_with(const DiffuseState& ds, const ScalarField* v) {
  const Grid& g = ds.u.grid();
  DiffuseEnergyParts e;
  e.gradient = ds.epsilon * dirichlet_energy(ds.u);
  double well = 0.0;
  for (double x : ds.u.values()) {
    const double w = x * x - 1.0;
    well += w * w;
  }
  e.well = well * g.cell_area() / ds.epsilon;
  if (ds.gamma0 != 0.0) e.nonlocal = ds.gamma0 * dirichlet_energy(*v);
  e.total = e.gradient + e.well + e.nonlocal;
  return e;
}

}  // namespace

DiffuseState make_diffuse_state(ScalarField u, double epsilon, double gamma0) {
  const double m = u.mean();
  DiffuseState ds{std::move(u), epsilon, gamma0, m};
  check_state(ds);
  return ds;
}

DiffuseEnergyParts diffuse_energy_parts(const DiffuseState& ds) {
  check_state(ds);
  if (ds.gamma0 == 0.0) return energy_with(ds, nullptr);
  const ScalarField v = solve_potential(ds.u);
  return energy_with(ds, &v);
}

double diffuse_energy(const DiffuseState& ds) { return diffuse_energy_parts(ds).total; }

double diffuse_step_bound(const DiffuseState& ds) {
  check_state(ds);
  const Grid& g = ds.u.grid();
  const double h = std::min(g.hx(), g.hy());
  return 0.1 * std::min(h * h / ds.epsilon, ds.epsilon);
}

DiffuseFlowResult conserved_gradient_flow(const DiffuseState& ds, const DiffuseFlowOptions& options) {
  check_state(ds);
  if (!(options.dt > 0.0) || options.steps < 0) throw Error("diffuse", "flow needs dt > 0 and steps >= 0");
  const double bound = diffuse_step_bound(ds);
  if (options.dt > bound) {
    std::ostringstream msg;
    msg << "time step " << options.dt << " exceeds the stability bound " << bound;
    throw Error("diffuse", msg.str());
  }
  if (!all_finite(ds.u.values())) throw Error("diffuse", "non-finite field");

  const Grid& g = ds.u.grid();
  const std::size_t n = g.cell_count();
  const simd::KernelTable& k = simd::active_kernels();
  const simd::StencilShape shape = shape_of(g);
  const bool coupled = ds.gamma0 != 0.0;

  DiffuseState cur = ds;
  std::optional<ScalarField> v;
  if (coupled) v = solve_potential(cur.u);
  double energy = energy_with(cur, v ? &*v : nullptr).total;
  double t = 0.0;

  DiffuseFlowResult out{cur, {}, 0};
  out.log.push_back({0, t, 0.0, energy, cur.u.mean(), 0});

  std::vector<double> neg_lap(n);
  std::vector<double> force(n);
  const std::vector<double> zeros(coupled ? 0 : n, 0.0);
  for (int step = 1; step <= options.steps; ++step) {
    const auto u = cur.u.values();
    k.apply_laplacian(u.data(), neg_lap.data(), shape);
    const double* vp = coupled ? v->values().data() : zeros.data();
    k.double_well_force(u.data(), neg_lap.data(), vp, 2.0 * cur.epsilon, 4.0 / cur.epsilon, 2.0 * cur.gamma0,
                        force.data(), n);
    const double mean_force = k.sum(force.data(), n) / static_cast<double>(n);
    for (double& f : force) f -= mean_force;

    double dt = options.dt;
    int halvings = 0;
    for (;;) {
      std::vector<double> next(u.begin(), u.end());
      k.axpy(-dt, force.data(), next.data(), n);
      if (!all_finite(next)) throw Error("diffuse", "non-finite field");
      DiffuseState trial{ScalarField(g, std::move(next)), cur.epsilon, cur.gamma0, cur.m};
      std::optional<ScalarField> tv;
      if (coupled) {
        PoissonOptions po;
        po.initial_guess = &*v;
        tv = solve_potential(trial.u, po);
      }
      const double e = energy_with(trial, tv ? &*tv : nullptr).total;
      if (e <= energy + 1e-12 * std::abs(energy)) {
        if (e > energy) ++out.accepted_increases;
        cur = std::move(trial);
        v = std::move(tv);
        energy = e;
        break;
      }
      if (++halvings > options.max_halvings) {
        throw Error("diffuse", "time step underflow: energy still increases after repeated halving");
      }
      dt *= 0.5;
    }
    t += dt;
    if (options.log_every > 0 && (step % options.log_every == 0 || step == options.steps)) {
      out.log.push_back({step, t, dt, energy, cur.u.mean(), halvings});
    }
  }
  out.final_state = std::move(cur);
  return out;
}

double sharp_limit_compare(const DiffuseState& ds, const RegionState& state) {
  const Grid& g = ds.u.grid();
  if (!same_domain(g.spec(), state.domain())) throw Error("diffuse", "mismatched grids");
  const std::vector<double> f = cell_fractions(region_polygon(state.interface(), state.domain()), g);
  const auto u = ds.u.values();
  double d = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) d += std::abs((u[c] > 0.0 ? 1.0 : 0.0) - f[c]);
  return d * g.cell_area();
}

double interface_width_x(const ScalarField& u) {
  const Grid& g = u.grid();
  std::vector<double> profile(g.nx(), 0.0);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) profile[i] += u.at(i, j) / g.ny();
  }
  auto crossing = [&](double level) -> std::optional<double> {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const double a = profile[i] - level;
      const double b = profile[i + 1] - level;
      if (a == 0.0) return (i + 0.5) * g.hx();
      if ((a < 0.0) != (b < 0.0)) return (i + 0.5 + a / (a - b)) * g.hx();
    }
    return std::nullopt;
  };
  const auto lo = crossing(-0.8);
  const auto hi = crossing(0.8);
  if (!lo || !hi) throw Error("diffuse", "profile has no transition between -0.8 and 0.8");
  return std::abs(*hi - *lo);
}

}  // namespace okstab

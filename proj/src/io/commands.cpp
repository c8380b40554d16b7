#include "okstab/io/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>

#include "okstab/diffuse.hpp"
#include "okstab/energy.hpp"
#include "okstab/error.hpp"
#include "okstab/io/csv.hpp"
#include "okstab/io/json_out.hpp"
#include "okstab/io/svg.hpp"
#include "okstab/probe.hpp"
#include "okstab/secondvar.hpp"
#include "okstab/simd/kernels.hpp"

namespace okstab::io {

namespace fs = std::filesystem;

namespace {

struct Context {
  const Scenario& s;
  fs::path dir;
  std::ostream& log;
  Json report;
};

Json point_json(Vec2 p) { return Json::array({p.x, p.y}); }

Json scenario_json(const Scenario& s) {
  Json d;
  d["kind"] = s.domain.periodic() ? "torus" : "rectangle";
  d["lx"] = s.domain.lx;
  d["ly"] = s.domain.ly;
  d["nx"] = s.domain.nx;
  d["ny"] = s.domain.ny;
  d["corner_margin"] = s.domain.effective_corner_margin();
  if (s.domain.mock_boundary_curvature) d["boundary_curvature"] = *s.domain.mock_boundary_curvature;
  const ConfigurationSpec& c = s.configuration;
  Json cfg;
  cfg["type"] = to_string(c.kind);
  switch (c.kind) {
    case ConfigurationSpec::Kind::lamella:
      cfg["a"] = c.a;
      cfg["nodes"] = c.nodes;
      break;
    case ConfigurationSpec::Kind::circle:
      cfg["center"] = point_json(c.center);
      cfg["radius"] = c.radius;
      cfg["e_inside"] = c.e_inside;
      cfg["nodes"] = c.nodes;
      break;
    case ConfigurationSpec::Kind::chord:
      cfg["from"] = point_json(c.from);
      cfg["to"] = point_json(c.to);
      cfg["nodes"] = c.nodes;
      break;
    case ConfigurationSpec::Kind::nodes:
      cfg["topology"] = c.topology == Topology::chord ? "chord" : "loop";
      cfg["e_on_left"] = c.e_on_left;
      cfg["nodes"] = c.points.size();
      break;
  }
  Json j;
  j["domain"] = d;
  j["configuration"] = cfg;
  j["gamma"] = s.gamma;
  j["seed"] = s.seed;
  return j;
}

RegionState make_state(const Scenario& s) {
  s.domain.validate();
  Interface iface = build_interface(s);
  validate_interface(iface, s.domain);
  return RegionState(std::move(iface), s.domain, s.gamma);
}

Json numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

void write_svg(const Context& c, const std::string& name, const std::string& svg) {
  write_text(c.dir / name, svg);
}

int cmd_energy(Context& c) {
  const RegionState state = make_state(c.s);
  const EnergyParts e = energy_parts(state);
  Json r;
  r["J"] = e.J;
  r["perimeter"] = e.P;
  r["nonlocal"] = e.NL;
  r["dirichlet_energy"] = dirichlet_energy(state.v());
  r["area"] = state.area();
  r["mass"] = state.mass();
  c.report["result"] = r;
  write_interface_csv(c.dir / "interface.csv", state.interface(),
                      {{"v", trace_on_curve(state.v(), state.interface())}});
  write_field_csv(c.dir / "field_u.csv", state.u());
  write_field_csv(c.dir / "field_v.csv", state.v());
  write_svg(c, "interface.svg", svg_interface(state.interface(), state.domain()));
  write_svg(c, "field_v.svg", svg_heatmap(state.v(), "potential v"));
  c.log << "J = " << format_number(e.J) << " (P = " << format_number(e.P) << ", NL = " << format_number(e.NL)
        << ")\n";
  return 0;
}

Json criticality_json(const CriticalityReport& cr) {
  Json r;
  r["J"] = cr.J;
  r["perimeter"] = cr.P;
  r["nonlocal"] = cr.NL;
  r["lambda"] = cr.lambda;
  r["residual_sup"] = cr.residual_sup;
  r["residual_l2"] = cr.residual_l2;
  r["ortho_residual"] = numbers(cr.ortho_residual);
  return r;
}

int cmd_critic(Context& c) {
  const RegionState state = make_state(c.s);
  const CriticalityReport cr = criticality(state);
  c.report["result"] = criticality_json(cr);
  write_interface_csv(c.dir / "residual.csv", state.interface(), {{"residual", cr.residual}});
  write_svg(c, "interface.svg", svg_interface(state.interface(), state.domain()));
  c.log << "residual_sup = " << format_number(cr.residual_sup) << ", lambda = " << format_number(cr.lambda)
        << "\n";
  return 0;
}

int cmd_stability(Context& c) {
  const RegionState state = make_state(c.s);
  const StabilityReport sr =
      stability_report(state, c.s.stability.tolerances, AssemblyOptions{c.s.stability.fourier_rank});
  Json r;
  r["verdict"] = to_string(sr.verdict);
  r["mu_min"] = sr.mu_min;
  r["gap_estimate"] = sr.gap_estimate;
  r["tol_positive"] = c.s.stability.tolerances.positive;
  r["tol_critical"] = c.s.stability.tolerances.critical;
  r["fourier_rank"] = c.s.stability.fourier_rank;
  r["criticality"] = criticality_json(sr.criticality);
  c.report["result"] = r;
  write_interface_csv(c.dir / "mode.csv", state.interface(), {{"mode", sr.mode}});
  write_svg(c, "interface.svg", svg_interface(state.interface(), state.domain()));
  write_svg(c, "mode.svg", svg_mode_overlay(state.interface(), state.domain(), sr.mode));
  c.log << "verdict " << to_string(sr.verdict) << ", mu_min = " << format_number(sr.mu_min) << "\n";
  return sr.verdict == Verdict::unstable ? 2 : 0;
}

int cmd_dispersion(Context& c) {
  const Scenario& s = c.s;
  if (s.configuration.kind != ConfigurationSpec::Kind::lamella || s.domain.periodic() || s.domain.lx != 1.0 ||
      s.domain.ly != 1.0) {
    throw Error("cli", "dispersion needs a lamella configuration in the unit square");
  }
  const RegionState state = make_state(s);
  const auto& nodes = state.interface().nodes();
  Json rows = Json::array();
  std::vector<std::vector<double>> csv;
  PlotSeries discrete{"discrete form", {}, {}, true};
  PlotSeries oracle{"closed form", {}, {}, false};
  double worst = 0.0;
  for (int k : s.dispersion.modes) {
    std::vector<double> phi(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) phi[i] = std::cos(k * std::numbers::pi * nodes[i].y);
    const FormTerms t = form_terms(state, phi);
    const double mu = lamella_dispersion(s.configuration.a, s.gamma, k);
    const double rel = (t.total - mu) / std::abs(mu);
    worst = std::max(worst, std::abs(rel));
    Json row;
    row["k"] = k;
    row["discrete"] = t.total;
    row["oracle"] = mu;
    row["relative_error"] = rel;
    row["stiffness"] = t.stiffness;
    row["nonlocal"] = t.nonlocal;
    row["potential"] = t.potential;
    rows.push_back(row);
    csv.push_back({static_cast<double>(k), t.total, mu, rel, t.stiffness, t.nonlocal, t.potential});
    discrete.x.push_back(k);
    discrete.y.push_back(t.total);
    oracle.x.push_back(k);
    oracle.y.push_back(mu);
  }
  Json r;
  r["a"] = s.configuration.a;
  r["modes"] = rows;
  r["max_relative_error"] = worst;
  c.report["result"] = r;
  write_csv(c.dir / "dispersion.csv",
            {"k", "discrete", "oracle", "relative_error", "stiffness", "nonlocal", "potential"}, csv);
  write_svg(c, "dispersion.svg",
            svg_plot({"second variation on cos(k pi y)", "k", "mu(k)", false, false}, {discrete, oracle}));
  c.log << "max relative error " << format_number(worst) << "\n";
  return 0;
}

std::vector<double> default_amplitudes() {
  std::vector<double> a(10);
  for (int i = 0; i < 10; ++i) a[i] = 1e-3 * std::pow(50.0, i / 9.0);
  return a;
}

int cmd_probe(Context& c) {
  const RegionState state = make_state(c.s);
  const std::vector<double> amps = c.s.probe.amplitudes.empty() ? default_amplitudes() : c.s.probe.amplitudes;
  ProbeOptions opts;
  opts.critical_tolerance = c.s.probe.critical_tolerance;
  const ProbeReport pr = minimality_probe(state, c.s.probe.samples, amps, c.s.seed, opts);
  const LambdaReport lr = lambda_minimality_check(state, c.s.probe.lambda_samples, c.s.seed);
  Json r;
  r["generator"] = probe_generator_name;
  r["seed"] = pr.seed;
  r["samples"] = pr.samples.size();
  r["amplitudes"] = numbers(amps);
  r["fitted_c"] = pr.fitted_c;
  r["min_ratio"] = pr.min_ratio;
  r["slope"] = pr.slope;
  r["negative_count"] = pr.negative_count;
  r["lambda_ratio_max"] = lr.ratio_max;
  r["probe_lambda_ratio_max"] = pr.lambda_ratio_max;
  c.report["result"] = r;
  std::vector<std::vector<double>> csv;
  PlotSeries scatter{"samples", {}, {}, true};
  for (const ProbeSample& p : pr.samples) {
    csv.push_back({p.amplitude, p.symmetric_difference, p.delta_j, p.perimeter_drop,
                   static_cast<double>(p.rejections)});
    scatter.x.push_back(p.symmetric_difference * p.symmetric_difference);
    scatter.y.push_back(p.delta_j);
  }
  write_csv(c.dir / "probe.csv", {"amplitude", "symmetric_difference", "delta_j", "perimeter_drop", "rejections"},
            csv);
  std::vector<std::vector<double>> lcsv;
  for (const ProbeSample& p : lr.samples) {
    lcsv.push_back({p.amplitude, p.symmetric_difference, p.perimeter_drop, static_cast<double>(p.rejections)});
  }
  write_csv(c.dir / "lambda.csv", {"amplitude", "symmetric_difference", "perimeter_drop", "rejections"}, lcsv);
  write_svg(c, "probe.svg", svg_plot({"J(F) - J(E) against |F sym E|^2", "|F sym E|^2", "J(F) - J(E)"}, {scatter}));
  c.log << "fitted_c = " << format_number(pr.fitted_c) << ", min_ratio = " << format_number(pr.min_ratio)
        << ", negatives = " << pr.negative_count << "\n";
  return 0;
}

int cmd_flow(Context& c) {
  const RegionState state = make_state(c.s);
  FlowOptions o;
  o.dt = c.s.flow.dt > 0.0 ? c.s.flow.dt : flow_step_bound(state);
  o.steps = c.s.flow.steps;
  o.snapshot_every = c.s.flow.snapshot_every;
  const FlowResult fr = volume_preserving_flow(state, o);
  double drift = 0.0;
  double worst_rise = 0.0;
  std::vector<std::vector<double>> csv;
  for (std::size_t i = 0; i < fr.log.size(); ++i) {
    const FlowStep& st = fr.log[i];
    drift = std::max(drift, std::abs(st.area - state.area()));
    if (i > 0) worst_rise = std::max(worst_rise, st.J - fr.log[i - 1].J);
    csv.push_back({static_cast<double>(st.step), st.t, st.dt, st.J, st.residual_sup, st.area, st.ortho_max,
                   static_cast<double>(st.halvings)});
  }
  const FlowStep& last = fr.log.back();
  Json r;
  r["dt"] = o.dt;
  r["steps"] = o.steps;
  r["t_final"] = last.t;
  r["J_initial"] = fr.log.front().J;
  r["J_final"] = last.J;
  r["residual_sup_initial"] = fr.log.front().residual_sup;
  r["residual_sup_final"] = last.residual_sup;
  r["ortho_max_final"] = last.ortho_max;
  r["area_drift_max"] = drift;
  r["largest_energy_rise"] = worst_rise;
  c.report["result"] = r;
  write_csv(c.dir / "flow.csv", {"step", "t", "dt", "J", "residual_sup", "area", "ortho_max", "halvings"}, csv);
  write_interface_csv(c.dir / "final_interface.csv", fr.final_state.interface());
  write_svg(c, "flow.svg", svg_snapshots(fr.snapshots, state.domain()));
  write_svg(c, "interface.svg", svg_interface(fr.final_state.interface(), state.domain()));
  c.log << "t = " << format_number(last.t) << ", J = " << format_number(last.J)
        << ", residual_sup = " << format_number(last.residual_sup) << "\n";
  return 0;
}

int cmd_gammastar(Context& c) {
  const GammaStarParams& g = c.s.gammastar;
  GammaSearchOptions o;
  o.grid = g.grid;
  o.nodes = g.nodes;
  o.gamma_lo = g.gamma_lo;
  o.gamma_hi = g.gamma_hi;
  const GammaSearchResult res = gamma_threshold_search(g.a, g.k_max, g.tol, o);
  double oracle = INFINITY;
  int oracle_k = 0;
  for (int k = 1; k <= 16; ++k) {
    if (const auto t = lamella_threshold(g.a, k); t && *t < oracle) {
      oracle = *t;
      oracle_k = k;
    }
  }
  Json r;
  r["a"] = g.a;
  r["k_max"] = g.k_max;
  r["grid"] = g.grid;
  r["nodes"] = g.nodes;
  r["tol"] = g.tol;
  r["gamma_star"] = res.gamma_star;
  r["mu_at_root"] = res.mu_at_root;
  r["iterations"] = res.iterations;
  r["bracket"] = Json::array({res.bracket_lo, res.bracket_hi});
  r["oracle_gamma_star"] = oracle;
  r["oracle_mode"] = oracle_k;
  r["relative_error"] = std::isfinite(oracle) ? (res.gamma_star - oracle) / oracle : NAN;
  c.report["result"] = r;

  // mu_min along the bracket for the plot
  const DomainSpec d = DomainSpec::rectangle(1.0, 1.0, g.grid, g.grid);
  const RegionState state(make_lamella(d, g.a, g.nodes), d, 0.0);
  const QuadraticFormMatrix form = assemble_form(state, AssemblyOptions{g.k_max});
  PlotSeries curve{"mu_min", {}, {}, false};
  std::vector<std::vector<double>> csv;
  for (int i = 0; i <= 20; ++i) {
    const double gamma = g.gamma_lo + (g.gamma_hi - g.gamma_lo) * i / 20.0;
    const double mu = min_eig_zero_mean(form.with_gamma(gamma)).mu_min;
    curve.x.push_back(gamma);
    curve.y.push_back(mu);
    csv.push_back({gamma, mu});
  }
  write_csv(c.dir / "mu_min.csv", {"gamma", "mu_min"}, csv);
  write_svg(c, "mu_min.svg", svg_plot({"smallest eigenvalue against gamma", "gamma", "mu_min"}, {curve}));
  c.log << "gamma* = " << format_number(res.gamma_star) << " (closed form " << format_number(oracle) << ")\n";
  return 0;
}

int cmd_diffuse(Context& c) {
  const RegionState state = make_state(c.s);
  const DiffuseParams& p = c.s.diffuse;
  const DiffuseState ds = make_diffuse_state(rasterize_indicator(state.interface(), state.grid()), p.epsilon, p.gamma0);
  DiffuseFlowOptions o;
  o.dt = p.dt > 0.0 ? p.dt : diffuse_step_bound(ds);
  o.steps = p.steps;
  o.log_every = p.log_every;
  const DiffuseFlowResult fr = conserved_gradient_flow(ds, o);
  const DiffuseEnergyParts e0 = diffuse_energy_parts(ds);
  const DiffuseEnergyParts e1 = diffuse_energy_parts(fr.final_state);
  double drift = 0.0;
  std::vector<std::vector<double>> csv;
  for (const DiffuseStep& st : fr.log) {
    drift = std::max(drift, std::abs(st.mass - ds.m));
    csv.push_back({static_cast<double>(st.step), st.t, st.dt, st.energy, st.mass, static_cast<double>(st.halvings)});
  }
  Json r;
  r["epsilon"] = p.epsilon;
  r["gamma0"] = p.gamma0;
  r["m"] = ds.m;
  r["dt"] = o.dt;
  r["steps"] = o.steps;
  r["energy_initial"] = e0.total;
  r["energy_final"] = e1.total;
  r["gradient_final"] = e1.gradient;
  r["well_final"] = e1.well;
  r["nonlocal_final"] = e1.nonlocal;
  r["mass_drift_max"] = drift;
  r["round_off_rises"] = fr.accepted_increases;
  r["sharp_distance"] = sharp_limit_compare(fr.final_state, state);
  r["sharp_perimeter_times_8_3"] = 8.0 / 3.0 * state.perimeter();
  c.report["result"] = r;
  write_csv(c.dir / "diffuse_log.csv", {"step", "t", "dt", "energy", "mass", "halvings"}, csv);
  write_field_csv(c.dir / "field_u.csv", fr.final_state.u);
  write_svg(c, "field_u.svg", svg_heatmap(fr.final_state.u, "phase field u"));
  c.log << "E = " << format_number(e1.total) << ", distance to sharp set = " << format_number(r["sharp_distance"].get<double>())
        << "\n";
  return 0;
}

const std::map<std::string, std::function<int(Context&)>>& table() {
  static const std::map<std::string, std::function<int(Context&)>> t = {
      {"energy", cmd_energy},       {"critic", cmd_critic}, {"stability", cmd_stability},
      {"dispersion", cmd_dispersion}, {"probe", cmd_probe}, {"flow", cmd_flow},
      {"gammastar", cmd_gammastar}, {"diffuse", cmd_diffuse}};
  return t;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"energy", "critic",   "stability", "dispersion",
                                                 "probe",  "flow",     "gammastar", "diffuse"};
  return names;
}

int run_command(const std::string& command, const Scenario& scenario, std::ostream& log) {
  const auto it = table().find(command);
  if (it == table().end()) throw Error("cli", "unknown command \"" + command + "\"");
  const fs::path dir = scenario.output;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cli", "cannot create output directory " + dir.string() + ": " + ec.message());

  Context c{scenario, dir, log, Json::object()};
  c.report["command"] = command;
  c.report["scenario"] = scenario_json(scenario);
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const int status = it->second(c);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.report["exit_status"] = status;
  write_text(dir / "report.json", dump_json(c.report));

  Json meta;
  meta["command"] = command;
  meta["okstab_version"] = version;
  meta["started_utc"] = started;
  meta["wall_seconds"] = wall;
  meta["simd_kernels"] = simd::active_kernels().name;
  meta["generator"] = probe_generator_name;
  write_text(dir / "meta.json", dump_json(meta));
  return status;
}

}  // namespace okstab::io

#include <cmath>
#include <string>

#include "doctest.h"
#include "okstab/diffuse.hpp"
#include "okstab/error.hpp"

using namespace okstab;

namespace {

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

ScalarField profile(const Grid& g, auto&& f) {
  ScalarField u(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) u.at(i, j) = f(g.center(i, j));
  return u;
}

// thin strip [0,1] x [0,1/16] with square cells
DomainSpec strip(int nx) { return DomainSpec::rectangle(1.0, 1.0 / 16, nx, nx / 16); }

}  // namespace

TEST_CASE("energy of constant states") {
  const Grid g(DomainSpec::rectangle(1, 1, 32, 32));
  CHECK(diffuse_energy(make_diffuse_state(ScalarField(g, 0.0), 0.05, 0.0)) == doctest::Approx(1.0 / 0.05));
  CHECK(diffuse_energy(make_diffuse_state(ScalarField(g, 1.0), 0.05, 3.0)) == 0.0);
  const DiffuseEnergyParts p = diffuse_energy_parts(make_diffuse_state(ScalarField(g, 0.3), 0.1, 2.0));
  CHECK(p.gradient == 0.0);
  CHECK(p.nonlocal == 0.0);
  CHECK(p.well == doctest::Approx(0.91 * 0.91 / 0.1));
}

TEST_CASE("energy of the optimal one-dimensional profile") {
  const double eps = 0.02;
  const Grid g(strip(1024));
  const ScalarField u = profile(g, [&](Vec2 p) { return std::tanh((p.x - 0.5) / eps); });
  const DiffuseEnergyParts e = diffuse_energy_parts(make_diffuse_state(u, eps, 0.0));
  // 8/3 per unit interface length, split evenly between gradient and well
  CHECK(e.total == doctest::Approx(8.0 / 3.0 / 16.0).epsilon(1e-2));
  CHECK(e.gradient == doctest::Approx(e.well).epsilon(2e-2));
  CHECK(interface_width_x(u) == doctest::Approx(2.0 * std::atanh(0.8) * eps).epsilon(1e-2));
}

TEST_CASE("constant states are stationary") {
  const Grid g(DomainSpec::rectangle(1, 1, 32, 32));
  for (double gamma0 : {0.0, 2.0}) {
    const DiffuseState ds = make_diffuse_state(ScalarField(g, 0.2), 0.05, gamma0);
    DiffuseFlowOptions o;
    o.dt = diffuse_step_bound(ds);
    o.steps = 200;
    const DiffuseFlowResult r = conserved_gradient_flow(ds, o);
    for (double v : r.final_state.u.values()) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("conserved flow keeps the mass and lowers the energy") {
  const Grid g(DomainSpec::rectangle(1, 1, 32, 32));
  for (double gamma0 : {0.0, 5.0}) {
    const ScalarField u0 = profile(g, [](Vec2 p) { return std::sin(7 * p.x) * std::cos(5 * p.y) + 0.1; });
    const DiffuseState ds = make_diffuse_state(u0, 0.1, gamma0);
    DiffuseFlowOptions o;
    o.dt = diffuse_step_bound(ds);
    o.steps = 10000;
    o.log_every = 1;
    const DiffuseFlowResult r = conserved_gradient_flow(ds, o);
    REQUIRE(r.log.size() == 10001);
    for (std::size_t i = 1; i < r.log.size(); ++i) {
      CHECK(r.log[i].energy <= r.log[i - 1].energy + 1e-12 * std::abs(r.log[i - 1].energy));
      CHECK(std::abs(r.log[i].mass - ds.m) <= 1e-10);
    }
    CHECK(r.log.back().energy < 0.5 * r.log.front().energy);
  }
}

TEST_CASE("step data relax to the tanh profile") {
  const double eps = 0.04;
  const Grid g(strip(256));
  const ScalarField u0 = profile(g, [](Vec2 p) { return p.x < 0.5 ? 1.0 : -1.0; });
  const DiffuseState ds = make_diffuse_state(u0, eps, 0.0);
  DiffuseFlowOptions o;
  o.dt = diffuse_step_bound(ds);
  o.steps = 4000;
  o.log_every = 100;
  const DiffuseFlowResult r = conserved_gradient_flow(ds, o);
  CHECK(interface_width_x(r.final_state.u) == doctest::Approx(2.0 * std::atanh(0.8) * eps).epsilon(3e-2));
  CHECK(r.log.back().energy < r.log.front().energy);
}

TEST_CASE("distance to the sharp set") {
  const DomainSpec d = DomainSpec::rectangle(1, 1, 64, 64);
  const Grid g(d);
  const RegionState e(make_lamella(d, 0.3, 33), d, 0.0);
  const double same = sharp_limit_compare(make_diffuse_state(e.u(), 0.05, 0.0), e);
  CHECK(same <= 64 * g.cell_area());

  const RegionState half(make_lamella(d, 0.5, 33), d, 0.0);
  CHECK(sharp_limit_compare(make_diffuse_state(ScalarField(g, -1.0), 0.05, 0.0), half) == doctest::Approx(0.5));

  const Grid other(DomainSpec::rectangle(1, 1, 32, 32));
  CHECK(error_of([&] { sharp_limit_compare(make_diffuse_state(ScalarField(other, -1.0), 0.05, 0.0), half); })
            .find("mismatched grids") != std::string::npos);
}

TEST_CASE("diffuse errors") {
  const Grid g(DomainSpec::rectangle(1, 1, 32, 32));
  CHECK(error_of([&] { make_diffuse_state(ScalarField(g), 0.0, 0.0); }).find("epsilon") != std::string::npos);
  CHECK(error_of([&] { make_diffuse_state(ScalarField(g), 0.1, -1.0); }).find("gamma0") != std::string::npos);
  const DiffuseState ds = make_diffuse_state(ScalarField(g, 0.1), 0.1, 0.0);
  DiffuseFlowOptions o;
  o.dt = 10.0 * diffuse_step_bound(ds);
  o.steps = 1;
  CHECK(error_of([&] { conserved_gradient_flow(ds, o); }).find("stability bound") != std::string::npos);
  CHECK(error_of([&] { interface_width_x(ScalarField(g, 0.1)); }).find("no transition") != std::string::npos);
}

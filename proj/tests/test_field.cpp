#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "okstab/error.hpp"
#include "okstab/field.hpp"
#include "okstab/region.hpp"

using namespace okstab;
using std::numbers::pi;

namespace {

DomainSpec square(int n) { return DomainSpec::rectangle(1, 1, n, n); }

double lamella_dirichlet(double a) { return 4.0 / 3.0 * a * a * (1 - a) * (1 - a); }

// Hat-weighted fraction of {x < a} for the cell centred at xc, with the hat
// mirrored at x = 0 and x = 1, by fine midpoint quadrature.
double hat_fraction_1d(double a, double xc, double h) {
  auto hat = [&](double x) { return std::max(0.0, 1.0 - std::abs(x - xc) / h); };
  const int m = 20000;
  double s = 0.0;
  for (int q = 0; q < m; ++q) {
    const double x = a * (q + 0.5) / m;
    s += hat(x) + hat(-x) + hat(2.0 - x);
  }
  return s * (a / m) / h;
}

}  // namespace

TEST_CASE("cell fractions of a lamella") {
  const Grid g(square(16));
  const RegionState s(make_lamella(square(16), 0.3, 33), square(16), 1.0);
  const ScalarField& u = s.u();
  // x = 0.3 lies in column 4 (cells [0.25, 0.3125])
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 4; ++i) CHECK(u.at(i, j) == 1.0);
    for (int i = 5; i < 16; ++i) CHECK(u.at(i, j) == -1.0);
    CHECK(u.at(4, j) == doctest::Approx(2.0 * (0.3 - 0.25) * 16 - 1.0));
  }
  const RegionState half(make_lamella(square(16), 0.5, 33), square(16), 1.0);
  CHECK(half.u().mean() == doctest::Approx(0.0).scale(1.0));
  (void)g;
}

TEST_CASE("indicator integrates to the shoelace area") {
  const DomainSpec d = square(64);
  for (const Interface& iface : {make_circle({0.43, 0.51}, 0.23, 97), make_circle({0.5, 0.5}, 0.2, 64, false),
                                 make_chord(d, {0.2, 0.0}, {0.7, 1.0}, 33)}) {
    const RegionState s(iface, d, 1.0);
    const Grid& g = s.grid();
    double area = 0.0;
    for (double u : s.u().values()) area += (u + 1.0) / 2.0 * g.cell_area();
    CHECK(area == doctest::Approx(s.area()).epsilon(1e-10));
    double hat_area = 0.0;
    for (double u : s.source().values()) hat_area += (u + 1.0) / 2.0 * g.cell_area();
    CHECK(hat_area == doctest::Approx(s.area()).epsilon(1e-10));
  }
  const DomainSpec t = DomainSpec::torus(1, 1, 32, 32);
  const RegionState wrap(make_circle({0.21, 0.5}, 0.2, 64), t, 1.0);
  double hat_area = 0.0;
  for (double f : hat_fractions(region_polygon(wrap.interface(), t), wrap.grid())) hat_area += f;
  CHECK(hat_area / (32.0 * 32.0) == doctest::Approx(pi * 0.04).epsilon(1e-3));
}

TEST_CASE("hat fractions of a lamella match the one-dimensional quadrature") {
  const int n = 16;
  const double h = 1.0 / n;
  const DomainSpec d = square(n);
  for (double a : {0.3, 0.5, 0.52}) {
    const auto f = hat_fractions(region_polygon(make_lamella(d, a, 33), d), Grid(d));
    for (int i = 0; i < n; ++i) {
      const double expect = hat_fraction_1d(a, (i + 0.5) * h, h);
      CHECK(f[7 * n + i] == doctest::Approx(expect).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("potential of constant and lamella data") {
  const Grid g(square(32));
  const ScalarField v0 = solve_potential(ScalarField(g, 0.7));
  CHECK(v0.max_abs() == 0.0);
  CHECK(dirichlet_energy(v0) == 0.0);

  const DomainSpec d = square(256);
  for (double a : {0.3, 0.5}) {
    const RegionState s(make_lamella(d, a, 129), d, 1.0);
    CHECK(dirichlet_energy(s.v()) == doctest::Approx(lamella_dirichlet(a)).epsilon(5e-3));
    for (double gv : gradient_on_curve(s.v(), s.interface()))
      CHECK(gv == doctest::Approx(-2.0 * a * (1.0 - a)).epsilon(1e-2));
    const auto tr = trace_on_curve(s.v(), s.interface());
    for (double t : tr) CHECK(t == doctest::Approx(tr[0]).epsilon(1e-6).scale(1e-3));
  }
  CHECK(dirichlet_energy(RegionState(make_lamella(d, 0.5, 129), d, 1.0).v()) ==
        doctest::Approx(1.0 / 12.0).epsilon(5e-3));
}

TEST_CASE("potential error decreases at second order") {
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    const DomainSpec t = DomainSpec::torus(1, 1, n, n);
    const Grid g(t);
    ScalarField u(g);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) u.at(i, j) = std::cos(2 * pi * g.center(i, j).x);
    const ScalarField v = solve_potential(u);
    double err = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) err = std::max(err, std::abs(v.at(i, j) - u.at(i, j) / (4 * pi * pi)));
    CHECK(err < 2e-3 / (4 * pi * pi) * (64.0 / n) * (64.0 / n));
    CHECK(dirichlet_energy(v) == doctest::Approx(1.0 / (8 * pi * pi)).epsilon(2e-3 * (64.0 / n) * (64.0 / n)));
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
}

TEST_CASE("discrete Green identity") {
  const DomainSpec d = square(64);
  const RegionState s(make_circle({0.4, 0.55}, 0.2, 64), d, 1.0);
  const auto src = s.source().values();
  const auto v = s.v().values();
  const double m = s.source().mean();
  double pairing = 0.0;
  for (std::size_t c = 0; c < v.size(); ++c) pairing += v[c] * (src[c] - m);
  pairing *= s.grid().cell_area();
  CHECK(dirichlet_energy(s.v()) == doctest::Approx(pairing).epsilon(1e-8));
}

TEST_CASE("solver reports non-convergence") {
  const Grid g(square(64));
  ScalarField u(g);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) u.at(i, j) = i < 20 ? 1.0 : -1.0;
  PoissonOptions o;
  o.max_iter = 2;
  try {
    solve_potential(u, o);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("did not converge") != std::string::npos);
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("line source on a flat interface") {
  const DomainSpec d = square(256);
  const Interface l = make_lamella(d, 0.5, 129);
  const Grid g(d);
  std::vector<double> zero(l.size(), 0.0), phi(l.size());
  CHECK(solve_line_source(zero, l, g).max_abs() == 0.0);
  for (std::size_t i = 0; i < l.size(); ++i) phi[i] = std::cos(pi * l.nodes()[i].y);

  const double w = std::cosh(pi / 2) * std::cosh(pi / 2) / (pi * std::sinh(pi));
  CHECK(w == doctest::Approx(0.17354).epsilon(1e-4));
  const auto tr = trace_on_curve(solve_line_source(phi, l, g), l);
  for (std::size_t i = 0; i < l.size(); i += 16) CHECK(tr[i] == doctest::Approx(w * phi[i]).epsilon(0.03).scale(0.01));
  CHECK(nonlocal_pairing(phi, phi, l, g) == doctest::Approx(w / 2).epsilon(1e-2));
}

TEST_CASE("nonlocal pairing is symmetric") {
  const DomainSpec d = square(64);
  const Interface c = make_circle({0.5, 0.5}, 0.25, 48);
  const Grid g(d);
  std::vector<double> phi(48), psi(48);
  for (std::size_t i = 0; i < 48; ++i) {
    phi[i] = std::sin(0.3 * i) + 0.2;
    psi[i] = std::cos(0.7 * i * i);
  }
  const double ab = nonlocal_pairing(phi, psi, c, g);
  const double ba = nonlocal_pairing(psi, phi, c, g);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-7));
  CHECK(nonlocal_pairing(phi, phi, c, g) > 0.0);
}

TEST_CASE("field sampling") {
  const Grid g(square(32));
  ScalarField f(g);
  for (int j = 0; j < 32; ++j)
    for (int i = 0; i < 32; ++i) f.at(i, j) = 2.0 * g.center(i, j).x + 3.0 * g.center(i, j).y;
  CHECK(sample(f, {0.4, 0.6}) == doctest::Approx(2.6));
  const Vec2 grad = sample_gradient(f, {0.41, 0.63});
  CHECK(grad.x == doctest::Approx(2.0));
  CHECK(grad.y == doctest::Approx(3.0));
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(10)), Error);
}

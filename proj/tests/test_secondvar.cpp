#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "doctest.h"
#include "okstab/error.hpp"
#include "okstab/secondvar.hpp"

using namespace okstab;
using std::numbers::pi;

namespace {

DomainSpec square(int n) { return DomainSpec::rectangle(1, 1, n, n); }

// Separation of variables for -W'' + (k pi)^2 W = delta_a on [0,1] with
// Neumann ends; the potential term is 4 gamma v'(a) = -8 gamma a(1-a).
double mu_oracle(double a, double gamma, int k) {
  const double kp = k * pi;
  const double w = std::cosh(kp * a) * std::cosh(kp * (1 - a)) / (kp * std::sinh(kp));
  return kp * kp / 2 + 4 * gamma * (w - a * (1 - a));
}

std::vector<double> cos_mode(const Interface& iface, int k) {
  std::vector<double> phi;
  for (Vec2 p : iface.nodes()) phi.push_back(std::cos(k * pi * p.y));
  return phi;
}

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("dispersion relation of the lamella") {
  for (int k = 1; k <= 6; ++k) CHECK(lamella_dispersion(0.3, 0.0, k) == doctest::Approx(k * k * pi * pi / 2));
  for (double a : {0.2, 0.5, 0.7})
    for (double g : {1.0, 10.0, 30.0})
      for (int k = 1; k <= 4; ++k) CHECK(lamella_dispersion(a, g, k) == doctest::Approx(mu_oracle(a, g, k)));
  CHECK(lamella_dispersion(0.5, 10.0, 40) > lamella_dispersion(0.5, 10.0, 20));
  CHECK(std::isfinite(lamella_dispersion(0.5, 10.0, 400)));
  const auto t = lamella_threshold(0.5, 1);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(16.133475953914377).epsilon(1e-9));
  CHECK(std::abs(mu_oracle(0.5, *t, 1)) < 1e-9);
  CHECK(error_of([] { lamella_dispersion(0.5, 1.0, 0); }).find("mode index") != std::string::npos);
  CHECK(error_of([] { lamella_dispersion(1.5, 1.0, 1); }).find("(0,1)") != std::string::npos);
}

TEST_CASE("perimeter-only form of a lamella is the Neumann stiffness") {
  const DomainSpec d = square(128);
  const RegionState s(make_lamella(d, 0.3, 65), d, 0.0);
  const QuadraticFormMatrix f = assemble_form(s);
  for (int k = 1; k <= 4; ++k) CHECK(f.value(cos_mode(s.interface(), k)) == doctest::Approx(k * k * pi * pi / 2).epsilon(1e-2));
  CHECK(min_eig_zero_mean(f).mu_min == doctest::Approx(pi * pi).epsilon(1e-2));
}

TEST_CASE("coupled form matches the dispersion oracle") {
  const DomainSpec d = square(128);
  const RegionState s(make_lamella(d, 0.5, 65), d, 1.0);
  const QuadraticFormMatrix f = assemble_form(s);
  CHECK(f.nonlocal_asymmetry < 1e-6);
  CHECK(f.value(cos_mode(s.interface(), 1)) == doctest::Approx(mu_oracle(0.5, 1.0, 1)).epsilon(2e-2));

  const QuadraticFormMatrix f10 = f.with_gamma(10.0);
  const EigenResult e = min_eig_zero_mean(f10);
  CHECK(e.mu_min == doctest::Approx(2 * mu_oracle(0.5, 10.0, 1)).epsilon(2e-2));
  const auto c = cos_mode(s.interface(), 1);
  double num = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    num += f.weights[i] * c[i] * e.mode[i];
    na += f.weights[i] * c[i] * c[i];
    nb += f.weights[i] * e.mode[i] * e.mode[i];
  }
  CHECK(std::abs(num) / std::sqrt(na * nb) > 0.99);
}

TEST_CASE("zero-mean constraint") {
  const DomainSpec d = square(64);
  const RegionState s(make_lamella(d, 0.4, 33), d, 2.0);
  const QuadraticFormMatrix f = assemble_form(s);
  const EigenResult e = min_eig_zero_mean(f);
  double mean = 0.0, norm2 = 0.0;
  for (std::size_t i = 0; i < e.mode.size(); ++i) {
    mean += f.weights[i] * e.mode[i];
    norm2 += f.weights[i] * e.mode[i] * e.mode[i];
  }
  CHECK(std::abs(mean) <= 1e-10);
  CHECK(norm2 == doctest::Approx(1.0));
  // the smallest constrained eigenvalue bounds the Rayleigh quotient of any zero-mean phi
  const auto c = cos_mode(s.interface(), 1);
  double cn = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) cn += f.weights[i] * c[i] * c[i];
  CHECK(f.value(c) / cn >= e.mu_min - 1e-9);
}

TEST_CASE("matrix form agrees with term-by-term quadrature") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DomainSpec mock = square(64);
  mock.mock_boundary_curvature = 2.0;
  const DomainSpec t = DomainSpec::torus(1, 1, 64, 64);
  const std::vector<RegionState> states{
      RegionState(make_lamella(square(64), 0.3, 33), square(64), 3.0),
      RegionState(make_circle({0.5, 0.5}, 0.22, 40), t, 5.0),
      RegionState(make_chord(mock, {0.45, 0.0}, {0.52, 1.0}, 33), mock, 1.0),
  };
  for (const RegionState& s : states) {
    const QuadraticFormMatrix f = assemble_form(s);
    for (int r = 0; r < 7; ++r) {
      std::vector<double> phi(s.interface().size());
      for (double& p : phi) p = u(rng);
      const FormTerms terms = form_terms(s, phi);
      CHECK(f.value(phi) == doctest::Approx(terms.total).epsilon(1e-8));
      // evenness and homogeneity
      std::vector<double> neg(phi), twice(phi);
      for (double& p : neg) p = -p;
      for (double& p : twice) p *= 2.0;
      CHECK(f.value(neg) == doctest::Approx(f.value(phi)).epsilon(1e-12));
      CHECK(f.value(twice) == doctest::Approx(4.0 * f.value(phi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mock boundary curvature enters through the wall point masses") {
  DomainSpec mock = square(64);
  mock.mock_boundary_curvature = 2.0;
  const RegionState flat(make_lamella(square(64), 0.3, 33), square(64), 1.0);
  const RegionState curved(make_lamella(mock, 0.3, 33), mock, 1.0);
  std::vector<double> one(33, 1.0);
  const FormTerms a = form_terms(flat, one);
  const FormTerms b = form_terms(curved, one);
  CHECK(a.boundary == 0.0);
  CHECK(b.boundary == doctest::Approx(4.0));
  CHECK(b.total == doctest::Approx(a.total - 4.0));
}

TEST_CASE("smallest eigenvalue decreases along the coupling ladder") {
  const DomainSpec d = square(128);
  const QuadraticFormMatrix f = assemble_form(RegionState(make_lamella(d, 0.5, 65), d, 1.0));
  double prev = INFINITY;
  for (int g = 1; g <= 30; ++g) {
    const double mu = min_eig_zero_mean(f.with_gamma(g)).mu_min;
    CHECK(mu < prev);
    prev = mu;
  }
}

TEST_CASE("stability verdicts") {
  const StabilityTolerances tol;
  CHECK(classify(1.0, 0.0, tol) == Verdict::stable);
  CHECK(classify(-1.0, 0.0, tol) == Verdict::unstable);
  CHECK(classify(1e-4, 0.0, tol) == Verdict::inconclusive);
  CHECK(classify(1.0, 0.5, tol) == Verdict::inconclusive);
  CHECK(std::string(to_string(Verdict::unstable)) == "unstable");

  const DomainSpec d = square(128);
  const StabilityReport stable = stability_report(RegionState(make_lamella(d, 0.5, 65), d, 1.0));
  CHECK(stable.verdict == Verdict::stable);
  CHECK(stable.mu_min > 0.0);
  const StabilityReport unstable = stability_report(RegionState(make_lamella(d, 0.5, 65), d, 30.0));
  CHECK(unstable.verdict == Verdict::unstable);
  const StabilityReport tilted = stability_report(RegionState(make_chord(d, {0.4, 0.0}, {0.6, 1.0}, 65), d, 1.0));
  CHECK(tilted.verdict == Verdict::inconclusive);
}

TEST_CASE("Fourier-reduced assembly approximates the full form on smooth modes") {
  const DomainSpec d = square(128);
  const RegionState s(make_lamella(d, 0.5, 65), d, 10.0);
  AssemblyOptions o;
  o.fourier_rank = 16;
  const double full = min_eig_zero_mean(assemble_form(s)).mu_min;
  const double reduced = min_eig_zero_mean(assemble_form(s, o)).mu_min;
  CHECK(reduced == doctest::Approx(full).epsilon(1e-2));
}

TEST_CASE("general second variation") {
  const DomainSpec d = square(128);
  const RegionState s(make_lamella(d, 0.3, 65), d, 1.0);
  const SecondVariation zero = general_second_variation(s, [](Vec2) { return Vec2{0.0, 0.0}; });
  CHECK(zero.total == 0.0);
  // a stream function vanishing on the walls gives a divergence-free tangential field
  const VectorField x = [](Vec2 p) {
    return Vec2{pi * std::sin(pi * p.x) * std::cos(pi * p.y), -pi * std::cos(pi * p.x) * std::sin(pi * p.y)};
  };
  const SecondVariation sv = general_second_variation(s, x);
  CHECK(std::abs(sv.extra_tangential + sv.extra_divergence) <= 1e-3 * std::abs(sv.form_part));

  CHECK(error_of([&] { general_second_variation(s, [](Vec2) { return Vec2{1.0, 0.0}; }); }).find("tangential") !=
        std::string::npos);
  const RegionState tilted(make_chord(d, {0.4, 0.0}, {0.6, 1.0}, 65), d, 1.0);
  CHECK(error_of([&] { general_second_variation(tilted, x); }).find("orthogonality") != std::string::npos);
  CHECK(error_of([&] { form_terms(s, std::vector<double>(3)); }).find("phi size") != std::string::npos);
}

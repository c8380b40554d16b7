#include "okstab/secondvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "okstab/error.hpp"

namespace okstab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd to_eigen(std::span<const double> x) {
  return Eigen::Map<const VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

MatrixXd stiffness_matrix(const Interface& iface) {
  const auto n = static_cast<Eigen::Index>(iface.size());
  MatrixXd s = MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < iface.segment_count(); ++k) {
    const auto a = static_cast<Eigen::Index>(k);
    const auto b = static_cast<Eigen::Index>((k + 1) % iface.size());
    const double c = 1.0 / iface.segment_length(k);
    s(a, a) += c;
    s(b, b) += c;
    s(a, b) -= c;
    s(b, a) -= c;
  }
  return s;
}

// kappa of the wall at each chord endpoint (zero for loops).
std::vector<std::pair<std::size_t, double>> wall_point_masses(const RegionState& state) {
  const Interface& iface = state.interface();
  if (!iface.is_chord()) return {};
  return {{0, boundary_curvature(state.domain(), iface.nodes().front())},
          {iface.size() - 1, boundary_curvature(state.domain(), iface.nodes().back())}};
}

// Orthonormal (Euclidean) basis of the leading Fourier modes in arclength.
MatrixXd fourier_basis(const Interface& iface, int rank) {
  const auto n = static_cast<Eigen::Index>(iface.size());
  const std::vector<double> s = iface.arclength();
  const double len = iface.perimeter();
  MatrixXd b(n, rank);
  for (int c = 0; c < rank; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = s[static_cast<std::size_t>(i)] / len;
      if (iface.is_chord()) {
        b(i, c) = std::cos(c * std::numbers::pi * t);
      } else {
        const int k = (c + 1) / 2;
        b(i, c) = c % 2 == 1 ? std::cos(2 * k * std::numbers::pi * t)
                             : (c == 0 ? 1.0 : std::sin(2 * k * std::numbers::pi * t));
      }
    }
  }
  Eigen::HouseholderQR<MatrixXd> qr(b);
  return qr.householderQ() * MatrixXd::Identity(n, rank);
}

}  // namespace

double QuadraticFormMatrix::value(std::span<const double> phi) const {
  if (phi.size() != nodes()) throw Error("secondvar", "phi size does not match form");
  const VectorXd x = to_eigen(phi);
  return x.dot(a * x);
}

QuadraticFormMatrix QuadraticFormMatrix::with_gamma(double g) const {
  QuadraticFormMatrix f = *this;
  f.gamma = g;
  f.a = local + g * coupling;
  return f;
}

QuadraticFormMatrix assemble_form(const RegionState& state, const AssemblyOptions& options) {
  const Interface& iface = state.interface();
  const auto n = static_cast<Eigen::Index>(iface.size());
  QuadraticFormMatrix f;
  f.gamma = state.gamma();
  f.kind = state.domain().kind;
  const std::vector<double> wq = quadrature_weights(iface);
  f.weights = to_eigen(wq);
  f.stiffness = stiffness_matrix(iface);

  const std::vector<double> b2 = second_fundamental_squared(iface);
  f.local = f.stiffness;
  for (Eigen::Index i = 0; i < n; ++i) f.local(i, i) -= b2[static_cast<std::size_t>(i)] * wq[static_cast<std::size_t>(i)];
  for (const auto& [node, kappa] : wall_point_masses(state)) {
    const auto i = static_cast<Eigen::Index>(node);
    f.local(i, i) -= kappa;
  }

  // Green double integral through the auxiliary line-source solve.
  const LineSplat splat(iface, state.grid());
  MatrixXd nl(n, n);
  std::vector<double> unit(iface.size(), 0.0);
  auto apply_nonlocal = [&](std::span<const double> phi) {
    const ScalarField w = solve_potential(splat.splat(phi));
    return to_eigen(splat.gather(w));
  };
  if (options.fourier_rank > 0 && options.fourier_rank < n) {
    const MatrixXd q = fourier_basis(iface, options.fourier_rank);
    MatrixXd nq(n, options.fourier_rank);
    for (int c = 0; c < options.fourier_rank; ++c) {
      const VectorXd col = q.col(c);
      nq.col(c) = apply_nonlocal(std::span<const double>(col.data(), static_cast<std::size_t>(n)));
    }
    const MatrixXd reduced = q.transpose() * nq;
    nl = q * (0.5 * (reduced + reduced.transpose())) * q.transpose();
    f.nonlocal_asymmetry = (reduced - reduced.transpose()).cwiseAbs().maxCoeff() /
                           std::max(reduced.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  } else {
    for (Eigen::Index j = 0; j < n; ++j) {
      unit[static_cast<std::size_t>(j)] = 1.0;
      nl.col(j) = apply_nonlocal(unit);
      unit[static_cast<std::size_t>(j)] = 0.0;
    }
    f.nonlocal_asymmetry = (nl - nl.transpose()).cwiseAbs().maxCoeff() /
                           std::max(nl.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    nl = 0.5 * (nl + nl.transpose());
  }
  splat.add_self_interaction(nl.data(), static_cast<std::size_t>(n));

  const std::vector<double> dv = gradient_on_curve(state.v(), iface);
  f.coupling = 8.0 * nl;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    f.coupling(i, i) += 4.0 * dv[k] * wq[k];
  }
  f.a = f.local + f.gamma * f.coupling;
  if (!f.a.allFinite()) throw Error("secondvar", "non-finite entries in the assembled form");
  return f;
}

FormTerms form_terms(const RegionState& state, std::span<const double> phi) {
  const Interface& iface = state.interface();
  if (phi.size() != iface.size()) throw Error("secondvar", "phi size does not match interface");
  FormTerms t;
  for (std::size_t k = 0; k < iface.segment_count(); ++k) {
    const double d = phi[(k + 1) % iface.size()] - phi[k];
    t.stiffness += d * d / iface.segment_length(k);
  }
  const std::vector<double> wq = quadrature_weights(iface);
  const std::vector<double> b2 = second_fundamental_squared(iface);
  const std::vector<double> dv = gradient_on_curve(state.v(), iface);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    t.curvature += b2[i] * phi[i] * phi[i] * wq[i];
    t.potential += 4.0 * dv[i] * phi[i] * phi[i] * wq[i];
  }
  for (const auto& [node, kappa] : wall_point_masses(state)) t.boundary += kappa * phi[node] * phi[node];
  const LineSplat splat(iface, state.grid());
  const std::vector<double> g = splat.gather(solve_potential(splat.splat(phi)));
  double pairing = splat.self_interaction(phi, phi);
  for (std::size_t i = 0; i < phi.size(); ++i) pairing += g[i] * phi[i];
  t.nonlocal = 8.0 * pairing;
  t.total = t.stiffness - t.curvature - t.boundary + state.gamma() * (t.nonlocal + t.potential);
  return t;
}

EigenResult min_eig_zero_mean(const QuadraticFormMatrix& form) {
  const auto n = static_cast<Eigen::Index>(form.nodes());
  // Columns 1..n-1 of the Householder Q for the constraint vector span its
  // orthogonal complement: the zero-mean subspace.
  Eigen::HouseholderQR<MatrixXd> qr(MatrixXd(form.weights));
  const MatrixXd q = qr.householderQ();
  const MatrixXd z = q.rightCols(n - 1);
  const MatrixXd ar = z.transpose() * form.a * z;
  const MatrixXd mr = z.transpose() * form.weights.asDiagonal() * z;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> solver(0.5 * (ar + ar.transpose()),
                                                            0.5 * (mr + mr.transpose()));
  if (solver.info() != Eigen::Success) throw Error("secondvar", "eigen-solver failure");
  EigenResult r;
  r.mu_min = solver.eigenvalues()(0);
  VectorXd mode = z * solver.eigenvectors().col(0);
  mode /= std::sqrt(mode.dot(form.weights.asDiagonal() * mode));
  Eigen::Index pivot = 0;
  mode.cwiseAbs().maxCoeff(&pivot);
  if (mode(pivot) < 0.0) mode = -mode;
  r.mode.assign(mode.data(), mode.data() + n);
  return r;
}

namespace {

void check_tangential(const DomainSpec& domain, const VectorField& field) {
  if (domain.periodic()) return;
  const Grid g(domain);
  double worst = 0.0;
  double scale = 1.0;
  auto probe = [&](Vec2 p, Vec2 normal) {
    const Vec2 x = field(p);
    scale = std::max(scale, norm(x));
    worst = std::max(worst, std::abs(dot(x, normal)));
  };
  for (int i = 0; i < g.nx(); ++i) {
    const double x = (i + 0.5) * g.hx();
    probe({x, 0.0}, {0.0, -1.0});
    probe({x, domain.ly}, {0.0, 1.0});
  }
  for (int j = 0; j < g.ny(); ++j) {
    const double y = (j + 0.5) * g.hy();
    probe({0.0, y}, {-1.0, 0.0});
    probe({domain.lx, y}, {1.0, 0.0});
  }
  if (worst > 1e-8 * scale) throw Error("secondvar", "vector field violates the tangential condition");
}

double divergence(const VectorField& field, Vec2 p, double hx, double hy) {
  return (field({p.x + hx, p.y}).x - field({p.x - hx, p.y}).x) / (2.0 * hx) +
         (field({p.x, p.y + hy}).y - field({p.x, p.y - hy}).y) / (2.0 * hy);
}

}  // namespace

SecondVariation general_second_variation(const RegionState& state, const VectorField& field) {
  const Interface& iface = state.interface();
  check_tangential(state.domain(), field);
  if (iface.is_chord()) {
    const auto o = orthogonality_residual(iface, state.domain());
    if (std::max(o[0], o[1]) > 1e-2) {
      throw Error("secondvar", "configuration violates the orthogonality condition");
    }
  }
  const std::size_t n = iface.size();
  const auto& x = iface.nodes();
  const auto nu = iface.normals();
  const auto tau = iface.tangents();
  std::vector<double> phi(n);
  std::vector<double> flux(n);
  std::vector<double> div(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 xi = field(x[i]);
    phi[i] = dot(xi, nu[i]);
    flux[i] = dot(xi, tau[i]) * phi[i];
    div[i] = divergence(field, x[i], state.grid().hx(), state.grid().hy());
  }
  SecondVariation sv;
  sv.form_part = form_terms(state, phi).total;
  const std::vector<double> f = first_variation_density(state);
  for (std::size_t k = 0; k < iface.segment_count(); ++k) {
    const std::size_t b = (k + 1) % n;
    sv.extra_tangential -= 0.5 * (f[k] + f[b]) * (flux[b] - flux[k]);
  }
  const std::vector<double> wq = quadrature_weights(iface);
  for (std::size_t i = 0; i < n; ++i) sv.extra_divergence += f[i] * div[i] * phi[i] * wq[i];
  sv.total = sv.form_part + sv.extra_tangential + sv.extra_divergence;
  return sv;
}

Interface advect_interface(const Interface& iface, const DomainSpec& domain, const VectorField& field,
                           double t, int substeps) {
  std::vector<Vec2> x = iface.nodes();
  const double dt = t / substeps;
  for (Vec2& p : x) {
    for (int s = 0; s < substeps; ++s) {
      const Vec2 k1 = field(p);
      const Vec2 k2 = field(p + 0.5 * dt * k1);
      const Vec2 k3 = field(p + 0.5 * dt * k2);
      const Vec2 k4 = field(p + dt * k3);
      p = p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  if (iface.is_chord()) {
    for (std::size_t e : {std::size_t{0}, x.size() - 1}) {
      const auto w = wall_of(domain, iface.nodes()[e]);
      if (!w) throw Error("secondvar", "chord endpoint is not on the boundary");
      x[e] = project_to_wall(domain, *w, x[e]);
    }
  }
  return Interface(std::move(x), iface.topology(), iface.e_on_left());
}

namespace {

// cosh(k pi a) cosh(k pi (1-a)) / (k pi sinh(k pi)), evaluated without overflow.
double lamella_green_coefficient(double a, int k) {
  const double kp = k * std::numbers::pi;
  const double ea = std::exp(-2.0 * kp * a);
  const double eb = std::exp(-2.0 * kp * (1.0 - a));
  const double et = std::exp(-2.0 * kp);
  return (1.0 + ea) * (1.0 + eb) / (2.0 * kp * (1.0 - et));
}

void check_lamella_args(double a, int k) {
  if (k < 1) throw Error("secondvar", "mode index must be at least 1 (constant mode violates zero mean)");
  if (!(a > 0.0 && a < 1.0)) throw Error("secondvar", "lamella position must lie in (0,1)");
}

}  // namespace

double lamella_dispersion(double a, double gamma, int k) {
  check_lamella_args(a, k);
  const double kp = k * std::numbers::pi;
  return 0.5 * kp * kp + 4.0 * gamma * (lamella_green_coefficient(a, k) - a * (1.0 - a));
}

std::optional<double> lamella_threshold(double a, int k) {
  check_lamella_args(a, k);
  const double bracket = lamella_green_coefficient(a, k) - a * (1.0 - a);
  if (bracket >= 0.0) return std::nullopt;
  const double kp = k * std::numbers::pi;
  return -0.5 * kp * kp / (4.0 * bracket);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict classify(double mu_min, double residual_sup, const StabilityTolerances& tol) {
  if (mu_min > tol.positive && residual_sup < tol.critical) return Verdict::stable;
  if (mu_min < -tol.positive) return Verdict::unstable;
  return Verdict::inconclusive;
}

StabilityReport stability_report(const RegionState& state, const StabilityTolerances& tol,
                                 const AssemblyOptions& options) {
  StabilityReport r;
  r.criticality = criticality(state);
  const QuadraticFormMatrix form = assemble_form(state, options);
  const EigenResult eig = min_eig_zero_mean(form);
  r.mu_min = eig.mu_min;
  r.mode = eig.mode;
  r.verdict = classify(r.mu_min, r.criticality.residual_sup, tol);
  const VectorXd m = to_eigen(r.mode);
  const double h1 = m.dot(form.stiffness * m) + m.dot(form.weights.asDiagonal() * m);
  r.gap_estimate = m.dot(form.a * m) / h1;
  return r;
}

}  // namespace okstab

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "okstab/energy.hpp"
#include "okstab/region.hpp"

namespace okstab {

/// Discrete second variation on nodal values of phi (piecewise linear in
/// arclength). The matrix splits as A(gamma) = local + gamma * coupling with
///   local    = S - K - Bd   (stiffness, |B_M|^2 mass, wall point masses)
///   coupling = 8 N + 4 V    (Green double integral, normal derivative of v)
/// so a form assembled once can be re-weighted for any coupling.
struct QuadraticFormMatrix {
  Eigen::MatrixXd a;
  Eigen::MatrixXd local;
  Eigen::MatrixXd coupling;
  Eigen::MatrixXd stiffness;
  Eigen::VectorXd weights;  // trapezoid H^1 weights; also the mean functional
  double gamma = 0.0;
  DomainKind kind = DomainKind::rectangle;
  double nonlocal_asymmetry = 0.0;  // max|N - N^T| / max|N| before symmetrisation

  std::size_t nodes() const { return static_cast<std::size_t>(a.rows()); }
  double value(std::span<const double> phi) const;
  QuadraticFormMatrix with_gamma(double gamma) const;
};

struct AssemblyOptions {
  // 0 assembles N column by column on nodal hat functions; r > 0 projects
  // N onto the leading r Fourier modes of the curve (r solves instead of n).
  int fourier_rank = 0;
};

QuadraticFormMatrix assemble_form(const RegionState& state, const AssemblyOptions& options = {});

/// Term-by-term quadrature of the form at one phi, independent of the
/// matrix assembly (one line-source solve).
struct FormTerms {
  double stiffness = 0.0;
  double curvature = 0.0;
  double boundary = 0.0;
  double nonlocal = 0.0;   // 8 * int int G phi phi (without gamma)
  double potential = 0.0;  // 4 * int <grad v, nu> phi^2 (without gamma)
  double total = 0.0;
};

FormTerms form_terms(const RegionState& state, std::span<const double> phi);

struct EigenResult {
  double mu_min = 0.0;
  std::vector<double> mode;  // unit L^2(M) norm, zero mean
};

/// Smallest eigenvalue of A phi = mu Mass phi on {sum Wq phi = 0}.
EigenResult min_eig_zero_mean(const QuadraticFormMatrix& form);

using VectorField = std::function<Vec2(Vec2)>;

struct SecondVariation {
  double form_part = 0.0;
  double extra_tangential = 0.0;  // -int (H + 4 gamma v) div_tau(X_tau <X,nu>)
  double extra_divergence = 0.0;  // +int (H + 4 gamma v) div(X) <X,nu>
  double total = 0.0;
};

/// d^2/dt^2 J(E_t) at t = 0 along the flow of X, for X tangent to the walls
/// and E meeting the walls orthogonally.
SecondVariation general_second_variation(const RegionState& state, const VectorField& field);

/// Moves every node along the flow of the field for time t (RK4), keeping
/// chord endpoints on their walls.
Interface advect_interface(const Interface& iface, const DomainSpec& domain, const VectorField& field,
                           double t, int substeps = 32);

/// Second variation of the lamella {x < a} in the unit square on the mode
/// cos(k pi y).
double lamella_dispersion(double a, double gamma, int k);
/// Root in gamma of lamella_dispersion(a, gamma, k) = 0; nullopt when the
/// nonlocal bracket is non-negative (the mode never destabilises).
std::optional<double> lamella_threshold(double a, int k);

enum class Verdict { stable, unstable, inconclusive };
const char* to_string(Verdict v);

struct StabilityTolerances {
  double positive = 1e-3 * 9.869604401089358;  // 1e-3 * pi^2
  double critical = 1e-2;
};

struct StabilityReport {
  double mu_min = 0.0;
  std::vector<double> mode;
  CriticalityReport criticality;
  Verdict verdict = Verdict::inconclusive;
  double gap_estimate = 0.0;
};

Verdict classify(double mu_min, double residual_sup, const StabilityTolerances& tol);

StabilityReport stability_report(const RegionState& state, const StabilityTolerances& tol = {},
                                 const AssemblyOptions& options = {});

}  // namespace okstab

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "okstab/error.hpp"
#include "okstab/field.hpp"
#include "okstab/simd/kernels.hpp"

namespace okstab {

namespace {

void remove_mean(const simd::KernelTable& k, std::vector<double>& x) {
  const double m = k.sum(x.data(), x.size()) / static_cast<double>(x.size());
  for (double& v : x) v -= m;
}

}  // namespace

ScalarField solve_potential(const ScalarField& u, const PoissonOptions& options, PoissonStats* stats) {
  const Grid& grid = u.grid();
  const auto& k = simd::active_kernels();
  const std::size_t n = grid.cell_count();
  const simd::StencilShape shape{grid.nx(), grid.ny(), 1.0 / (grid.hx() * grid.hx()),
                                 1.0 / (grid.hy() * grid.hy()), grid.periodic()};
  const int max_iter = options.max_iter > 0 ? options.max_iter : 20 * (grid.nx() + grid.ny());

  if (stats) *stats = {};
  // a constant source leaves only round-off after the mean is removed
  const auto [lo, hi] = std::minmax_element(u.values().begin(), u.values().end());
  if (*hi - *lo <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(*lo), std::abs(*hi))) {
    return ScalarField(grid, 0.0, true);
  }
  std::vector<double> b(u.values().begin(), u.values().end());
  remove_mean(k, b);
  const double b_norm = std::sqrt(k.dot(b.data(), b.data(), n));

  std::vector<double> x(n, 0.0);
  std::vector<double> r = b;
  std::vector<double> ap(n);
  if (options.initial_guess != nullptr) {
    const auto g = options.initial_guess->values();
    if (g.size() != n) throw Error("field", "initial guess does not match grid");
    x.assign(g.begin(), g.end());
    remove_mean(k, x);
    k.apply_laplacian(x.data(), ap.data(), shape);
    k.axpy(-1.0, ap.data(), r.data(), n);
  }
  std::vector<double> p = r;
  double rr = k.dot(r.data(), r.data(), n);
  const double target = options.rel_tol * b_norm;
  int it = 0;
  while (std::sqrt(rr) > target) {
    if (it == max_iter) {
      std::ostringstream msg;
      msg << "Poisson solver did not converge after " << it
          << " iterations (relative residual " << std::sqrt(rr) / b_norm << ")";
      throw Error("field", msg.str());
    }
    k.apply_laplacian(p.data(), ap.data(), shape);
    const double alpha = rr / k.dot(p.data(), ap.data(), n);
    k.axpy(alpha, p.data(), x.data(), n);
    k.axpy(-alpha, ap.data(), r.data(), n);
    if (++it % 32 == 0) remove_mean(k, r);
    const double rr_next = k.dot(r.data(), r.data(), n);
    k.xpay(r.data(), rr_next / rr, p.data(), n);
    rr = rr_next;
  }
  remove_mean(k, x);
  if (stats) *stats = {it, std::sqrt(rr) / b_norm};
  return ScalarField(grid, std::move(x), true);
}

}  // namespace okstab

#include "okstab/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "okstab/error.hpp"
#include "okstab/simd/kernels.hpp"

namespace okstab {

ScalarField::ScalarField(const Grid& grid, double fill, bool mean_zero)
    : grid_(grid), values_(grid.cell_count(), fill), mean_zero_(mean_zero) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values, bool mean_zero)
    : grid_(grid), values_(std::move(values)), mean_zero_(mean_zero) {
  if (values_.size() != grid_.cell_count()) throw Error("field", "value count does not match grid");
}

double ScalarField::mean() const {
  return simd::active_kernels().sum(values_.data(), values_.size()) / static_cast<double>(values_.size());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// Mean over t in [0,1] of max(0, y(t) - c) for y linear from ya to yb.
double positive_part_mean(double ya, double yb, double c) {
  const double lo = std::min(ya, yb);
  const double hi = std::max(ya, yb);
  if (c >= hi) return 0.0;
  if (c <= lo) return 0.5 * (ya + yb) - c;
  return (hi - c) * (hi - c) / (2.0 * (hi - lo));
}

// Bilinear stencil on cell centres with Neumann clamping or periodic wrap.
struct Bilinear {
  std::size_t cells[4];
  double weights[4];
};

Bilinear bilinear_stencil(const Grid& g, Vec2 p) {
  double gx = p.x / g.hx() - 0.5;
  double gy = p.y / g.hy() - 0.5;
  int i0;
  int j0;
  int i1;
  int j1;
  if (g.periodic()) {
    i0 = static_cast<int>(std::floor(gx));
    j0 = static_cast<int>(std::floor(gy));
    gx -= i0;
    gy -= j0;
    i1 = g.wrap_i(i0 + 1);
    j1 = g.wrap_j(j0 + 1);
    i0 = g.wrap_i(i0);
    j0 = g.wrap_j(j0);
  } else {
    gx = std::clamp(gx, 0.0, static_cast<double>(g.nx() - 1));
    gy = std::clamp(gy, 0.0, static_cast<double>(g.ny() - 1));
    i0 = std::min(static_cast<int>(std::floor(gx)), g.nx() - 2);
    j0 = std::min(static_cast<int>(std::floor(gy)), g.ny() - 2);
    gx -= i0;
    gy -= j0;
    i1 = i0 + 1;
    j1 = j0 + 1;
  }
  return {{g.index(i0, j0), g.index(i1, j0), g.index(i0, j1), g.index(i1, j1)},
          {(1 - gx) * (1 - gy), gx * (1 - gy), (1 - gx) * gy, gx * gy}};
}

}  // namespace

std::vector<double> cell_fractions(const RegionPolygon& region, const Grid& grid) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  const double hx = grid.hx();
  const double hy = grid.hy();
  std::vector<double> area(grid.cell_count(), 0.0);
  const auto& ring = region.ring;
  const std::size_t n = ring.size();
  // |P ∩ cell| = -∮ clamp(y - y_j, 0, hy) 1[x in column] dx over the ccw boundary.
  for (std::size_t e = 0; e < n; ++e) {
    const Vec2 p = ring[e];
    const Vec2 q = ring[(e + 1) % n];
    if (p.x == q.x) continue;
    const double slope = (q.y - p.y) / (q.x - p.x);
    const double x_lo = std::min(p.x, q.x);
    const double x_hi = std::max(p.x, q.x);
    const double direction = q.x > p.x ? 1.0 : -1.0;
    const int i_first = std::clamp(static_cast<int>(std::floor(x_lo / hx)), 0, nx - 1);
    const int i_last = std::clamp(static_cast<int>(std::floor(x_hi / hx)), 0, nx - 1);
    for (int i = i_first; i <= i_last; ++i) {
      const double xa = i == i_first ? x_lo : std::max(x_lo, i * hx);
      const double xb = i == i_last ? x_hi : std::min(x_hi, (i + 1) * hx);
      if (xb <= xa) continue;
      const double ya = p.y + slope * (xa - p.x);
      const double yb = p.y + slope * (xb - p.x);
      const double dx = direction * (xb - xa);
      const double y_top = std::max(ya, yb);
      const double y_bot = std::min(ya, yb);
      const int j_top = std::min(ny - 1, static_cast<int>(std::floor(y_top / hy)));
      const int j_bot = std::max(0, static_cast<int>(std::floor(y_bot / hy)));
      for (int j = 0; j < j_bot && j < ny; ++j) area[grid.index(i, j)] -= dx * hy;
      for (int j = std::max(0, j_bot); j <= j_top; ++j) {
        const double yj = j * hy;
        const double part = positive_part_mean(ya, yb, yj) - positive_part_mean(ya, yb, yj + hy);
        area[grid.index(i, j)] -= dx * part;
      }
    }
  }
  const double inv = 1.0 / grid.cell_area();
  for (double& a : area) {
    a = std::clamp(a * inv, 0.0, 1.0);
    if (region.complement) a = 1.0 - a;
  }
  return area;
}

namespace {

// Moments of P ∩ subcell (subcells are half cells), in local coordinates
// (sx, sy) measured from the subcell's lower-left corner.
struct SubcellMoments {
  double m0 = 0.0;
  double mx = 0.0;
  double my = 0.0;
  double mxy = 0.0;
};

}  // namespace

std::vector<double> hat_fractions(const RegionPolygon& region, const Grid& grid) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  const int qx_count = 2 * nx;
  const int qy_count = 2 * ny;
  const double sx = 0.5 * grid.hx();
  const double sy = 0.5 * grid.hy();
  std::vector<SubcellMoments> mom(static_cast<std::size_t>(qx_count) * qy_count);
  // Contributions shared by every subrow strictly below a given one.
  std::vector<SubcellMoments> below(static_cast<std::size_t>(qx_count) * (qy_count + 1));
  auto at = [&](std::vector<SubcellMoments>& v, int q, int r, int rows) -> SubcellMoments& {
    return v[static_cast<std::size_t>(q) * rows + r];
  };
  constexpr double g = 0.57735026918962576;  // 1/sqrt(3)

  // Over the ccw boundary, the moment of g(x) k(y) on P ∩ (column × band)
  // is -∮ g(x) K(clamp(y - y_r, 0, sy)) dx with K' = k, K(0) = 0.
  auto piece = [&](int q, double xa, double xb, double ya, double yb) {
    const double x0 = q * sx;
    const double ymid = 0.5 * (ya + yb);
    const int r = std::clamp(static_cast<int>(std::floor(ymid / sy)), 0, qy_count);
    const double half = 0.5 * (xb - xa);
    const double mid = 0.5 * (xa + xb);
    const double slope = xb != xa ? (yb - ya) / (xb - xa) : 0.0;
    SubcellMoments part;
    SubcellMoments full;
    for (double node : {-g, g}) {
      const double x = mid + node * half;
      const double y = ya + slope * (x - xa);
      const double lx = x - x0;
      const double t = std::clamp(y - r * sy, 0.0, sy);
      part.m0 -= half * t;
      part.mx -= half * lx * t;
      part.my -= half * 0.5 * t * t;
      part.mxy -= half * lx * 0.5 * t * t;
      full.m0 -= half * sy;
      full.mx -= half * lx * sy;
      full.my -= half * 0.5 * sy * sy;
      full.mxy -= half * lx * 0.5 * sy * sy;
    }
    if (r < qy_count) {
      SubcellMoments& m = at(mom, q, r, qy_count);
      m.m0 += part.m0;
      m.mx += part.mx;
      m.my += part.my;
      m.mxy += part.mxy;
    }
    SubcellMoments& b = at(below, q, r, qy_count + 1);
    b.m0 += full.m0;
    b.mx += full.mx;
    b.my += full.my;
    b.mxy += full.mxy;
  };

  const auto& ring = region.ring;
  const std::size_t n = ring.size();
  std::vector<double> cuts;
  for (std::size_t e = 0; e < n; ++e) {
    const Vec2 p = ring[e];
    const Vec2 q = ring[(e + 1) % n];
    if (p.x == q.x) continue;
    const double slope = (q.y - p.y) / (q.x - p.x);
    const double x_lo = std::min(p.x, q.x);
    const double x_hi = std::max(p.x, q.x);
    const bool forward = q.x > p.x;
    const int c_first = std::clamp(static_cast<int>(std::floor(x_lo / sx)), 0, qx_count - 1);
    const int c_last = std::clamp(static_cast<int>(std::floor(x_hi / sx)), 0, qx_count - 1);
    for (int c = c_first; c <= c_last; ++c) {
      const double xa = c == c_first ? x_lo : std::max(x_lo, c * sx);
      const double xb = c == c_last ? x_hi : std::min(x_hi, (c + 1) * sx);
      if (xb <= xa) continue;
      const double ya = p.y + slope * (xa - p.x);
      const double yb = p.y + slope * (xb - p.x);
      cuts.assign({xa, xb});
      if (ya != yb) {
        const double lo = std::min(ya, yb);
        const double hi = std::max(ya, yb);
        for (int k = static_cast<int>(std::floor(lo / sy)) + 1; k * sy < hi; ++k) {
          cuts.push_back(xa + (k * sy - ya) / (yb - ya) * (xb - xa));
        }
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double u0 = cuts[k];
        const double u1 = cuts[k + 1];
        if (u1 <= u0) continue;
        const double v0 = p.y + slope * (u0 - p.x);
        const double v1 = p.y + slope * (u1 - p.x);
        if (forward) {
          piece(c, u0, u1, v0, v1);
        } else {
          piece(c, u1, u0, v1, v0);
        }
      }
    }
  }
  for (int q = 0; q < qx_count; ++q) {
    SubcellMoments acc;
    for (int r = qy_count - 1; r >= 0; --r) {
      const SubcellMoments& b = at(below, q, r + 1, qy_count + 1);
      acc.m0 += b.m0;
      acc.mx += b.mx;
      acc.my += b.my;
      acc.mxy += b.mxy;
      SubcellMoments& m = at(mom, q, r, qy_count);
      m.m0 += acc.m0;
      m.mx += acc.mx;
      m.my += acc.my;
      m.mxy += acc.mxy;
    }
  }

  // Hat weights on a subcell are linear in the local coordinate: the owning
  // cell and its neighbour across the nearer face share them. Walls fold the
  // missing neighbour back onto the owner.
  struct Share {
    int cell;
    double alpha;
    double beta;
  };
  auto shares = [&](int q, int count, double h, bool periodic) {
    const int cell = q / 2;
    std::array<Share, 2> s;
    if (q % 2 == 0) {
      s[0] = {cell, 0.5, 1.0 / h};
      s[1] = {cell - 1, 0.5, -1.0 / h};
    } else {
      s[0] = {cell, 1.0, -1.0 / h};
      s[1] = {cell + 1, 0.0, 1.0 / h};
    }
    if (s[1].cell < 0 || s[1].cell >= count) {
      if (periodic) {
        s[1].cell = (s[1].cell + count) % count;
      } else {
        s[1].cell = cell;
      }
    }
    return s;
  };
  std::vector<double> load(grid.cell_count(), 0.0);
  for (int q = 0; q < qx_count; ++q) {
    const auto xs = shares(q, nx, grid.hx(), grid.periodic());
    for (int r = 0; r < qy_count; ++r) {
      const SubcellMoments& m = at(mom, q, r, qy_count);
      if (m.m0 == 0.0 && m.mx == 0.0 && m.my == 0.0 && m.mxy == 0.0) continue;
      const auto ys = shares(r, ny, grid.hy(), grid.periodic());
      for (const Share& a : xs) {
        for (const Share& b : ys) {
          load[grid.index(a.cell, b.cell)] +=
              a.alpha * b.alpha * m.m0 + a.alpha * b.beta * m.my + a.beta * b.alpha * m.mx + a.beta * b.beta * m.mxy;
        }
      }
    }
  }
  const double inv = 1.0 / grid.cell_area();
  for (double& a : load) {
    a = std::clamp(a * inv, 0.0, 1.0);
    if (region.complement) a = 1.0 - a;
  }
  return load;
}

ScalarField hat_indicator(const Interface& iface, const Grid& grid) {
  std::vector<double> f = hat_fractions(region_polygon(iface, grid.spec()), grid);
  for (double& v : f) v = 2.0 * v - 1.0;
  return ScalarField(grid, std::move(f));
}

ScalarField rasterize_indicator(const Interface& iface, const Grid& grid) {
  std::vector<double> f = cell_fractions(region_polygon(iface, grid.spec()), grid);
  for (double& v : f) v = 2.0 * v - 1.0;
  return ScalarField(grid, std::move(f));
}

double dirichlet_energy(const ScalarField& v) {
  const Grid& g = v.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double wx = g.hy() / g.hx();
  const double wy = g.hx() / g.hy();
  double e = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = v.at(i, j);
      if (i + 1 < nx || g.periodic()) {
        const double d = v.at(g.wrap_i(i + 1), j) - c;
        e += wx * d * d;
      }
      if (j + 1 < ny || g.periodic()) {
        const double d = v.at(i, g.wrap_j(j + 1)) - c;
        e += wy * d * d;
      }
    }
  }
  return e;
}

double sample(const ScalarField& v, Vec2 p) {
  const Bilinear b = bilinear_stencil(v.grid(), p);
  const auto vals = v.values();
  double s = 0.0;
  for (int c = 0; c < 4; ++c) s += b.weights[c] * vals[b.cells[c]];
  return s;
}

namespace {

// Face difference along x at face k (between cells k-1 and k) in row j.
double face_dx(const ScalarField& v, int k, int j) {
  const Grid& g = v.grid();
  if (g.periodic()) return (v.at(g.wrap_i(k), j) - v.at(g.wrap_i(k - 1), j)) / g.hx();
  if (k <= 0 || k >= g.nx()) return 0.0;
  return (v.at(k, j) - v.at(k - 1, j)) / g.hx();
}

double face_dy(const ScalarField& v, int i, int k) {
  const Grid& g = v.grid();
  if (g.periodic()) return (v.at(i, g.wrap_j(k)) - v.at(i, g.wrap_j(k - 1))) / g.hy();
  if (k <= 0 || k >= g.ny()) return 0.0;
  return (v.at(i, k) - v.at(i, k - 1)) / g.hy();
}

// Interpolates a face-staggered quantity: faces along `normal_axis` sit at
// integer multiples of h, the other coordinate at cell centres.
template <class FaceValue>
double interpolate_faces(const Grid& g, double along, double across, int n_along, int n_across,
                         double h_along, double h_across, FaceValue&& value) {
  double f = along / h_along;
  double c = across / h_across - 0.5;
  int k0;
  int c0;
  int c1;
  if (g.periodic()) {
    k0 = static_cast<int>(std::floor(f));
    c0 = static_cast<int>(std::floor(c));
    f -= k0;
    c -= c0;
    c1 = c0 + 1;
    c0 = ((c0 % n_across) + n_across) % n_across;
    c1 = ((c1 % n_across) + n_across) % n_across;
  } else {
    f = std::clamp(f, 0.0, static_cast<double>(n_along));
    c = std::clamp(c, 0.0, static_cast<double>(n_across - 1));
    k0 = std::min(static_cast<int>(std::floor(f)), n_along - 1);
    c0 = std::min(static_cast<int>(std::floor(c)), n_across - 2);
    f -= k0;
    c -= c0;
    c1 = c0 + 1;
  }
  return (1 - f) * (1 - c) * value(k0, c0) + f * (1 - c) * value(k0 + 1, c0) +
         (1 - f) * c * value(k0, c1) + f * c * value(k0 + 1, c1);
}

}  // namespace

Vec2 sample_gradient(const ScalarField& v, Vec2 p) {
  const Grid& g = v.grid();
  const double gx = interpolate_faces(g, p.x, p.y, g.nx(), g.ny(), g.hx(), g.hy(),
                                      [&](int k, int j) { return face_dx(v, k, j); });
  const double gy = interpolate_faces(g, p.y, p.x, g.ny(), g.nx(), g.hy(), g.hx(),
                                      [&](int k, int i) { return face_dy(v, i, k); });
  return {gx, gy};
}

namespace {

void check_inside_closure(const Grid& g, Vec2 p) {
  const DomainSpec& s = g.spec();
  const double tol = 1e-8 * std::min(s.lx, s.ly);
  if (p.x < -tol || p.y < -tol || p.x > s.lx + tol || p.y > s.ly + tol) {
    throw Error("field", "curve node outside the domain");
  }
}

}  // namespace

std::vector<double> trace_on_curve(const ScalarField& v, const Interface& iface) {
  std::vector<double> out;
  out.reserve(iface.size());
  for (Vec2 p : iface.nodes()) {
    check_inside_closure(v.grid(), p);
    out.push_back(sample(v, p));
  }
  return out;
}

std::vector<double> gradient_on_curve(const ScalarField& v, const Interface& iface) {
  const auto nu = iface.normals();
  std::vector<double> out;
  out.reserve(iface.size());
  for (std::size_t i = 0; i < iface.size(); ++i) {
    check_inside_closure(v.grid(), iface.nodes()[i]);
    out.push_back(dot(sample_gradient(v, iface.nodes()[i]), nu[i]));
  }
  return out;
}

LineSplat::LineSplat(const Interface& iface, const Grid& grid)
    : grid_(grid), node_count_(iface.size()) {
  const double piece = 0.5 * std::min(grid.hx(), grid.hy());
  const std::size_t n = iface.size();
  for (std::size_t k = 0; k < iface.segment_count(); ++k) {
    const Vec2 a = iface.segment_start(k);
    const Vec2 b = iface.segment_end(k);
    const double len = distance(a, b);
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(len / piece)));
    const double ell = len / static_cast<double>(m);
    for (std::size_t q = 0; q < m; ++q) {
      const double t = (static_cast<double>(q) + 0.5) / static_cast<double>(m);
      const Bilinear st = bilinear_stencil(grid, a + t * (b - a));
      Sample s{};
      s.node_a = k;
      s.node_b = (k + 1) % n;
      s.weight_a = (1.0 - t) * ell;
      s.weight_b = t * ell;
      for (int c = 0; c < 4; ++c) {
        s.cells[c] = st.cells[c];
        s.cell_weights[c] = st.weights[c];
      }
      // Footprint offsets: cell c sits at ((c & 1) hx, (c >> 1) hy).
      const Vec2 nu = right_normal(normalized(b - a));
      double spread = 0.0;
      for (int c = 0; c < 4; ++c) {
        for (int d = 0; d < 4; ++d) {
          const Vec2 off{((c & 1) - (d & 1)) * grid.hx(), ((c >> 1) - (d >> 1)) * grid.hy()};
          spread += st.weights[c] * st.weights[d] * std::abs(dot(off, nu));
        }
      }
      s.spread = 0.5 * spread * ell;
      samples_.push_back(s);
    }
  }
}

ScalarField LineSplat::splat(std::span<const double> phi) const {
  if (phi.size() != node_count_) throw Error("field", "phi size does not match interface");
  ScalarField src(grid_);
  auto vals = src.values();
  const double inv_area = 1.0 / grid_.cell_area();
  for (const Sample& s : samples_) {
    const double mass = (s.weight_a * phi[s.node_a] + s.weight_b * phi[s.node_b]) * inv_area;
    for (int c = 0; c < 4; ++c) vals[s.cells[c]] += s.cell_weights[c] * mass;
  }
  return src;
}

std::vector<double> LineSplat::gather(const ScalarField& w) const {
  std::vector<double> out(node_count_, 0.0);
  const auto vals = w.values();
  for (const Sample& s : samples_) {
    double value = 0.0;
    for (int c = 0; c < 4; ++c) value += s.cell_weights[c] * vals[s.cells[c]];
    out[s.node_a] += s.weight_a * value;
    out[s.node_b] += s.weight_b * value;
  }
  return out;
}

double LineSplat::self_interaction(std::span<const double> phi, std::span<const double> psi) const {
  double acc = 0.0;
  for (const Sample& s : samples_) {
    const double t = s.weight_b / (s.weight_a + s.weight_b);
    const double fp = (1.0 - t) * phi[s.node_a] + t * phi[s.node_b];
    const double fq = (1.0 - t) * psi[s.node_a] + t * psi[s.node_b];
    acc += s.spread * fp * fq;
  }
  return acc;
}

void LineSplat::add_self_interaction(double* matrix, std::size_t ld) const {
  for (const Sample& s : samples_) {
    const double t = s.weight_b / (s.weight_a + s.weight_b);
    const double wa = 1.0 - t;
    const double wb = t;
    matrix[s.node_a * ld + s.node_a] += s.spread * wa * wa;
    matrix[s.node_b * ld + s.node_b] += s.spread * wb * wb;
    matrix[s.node_a * ld + s.node_b] += s.spread * wa * wb;
    matrix[s.node_b * ld + s.node_a] += s.spread * wa * wb;
  }
}

ScalarField solve_line_source(std::span<const double> phi, const Interface& iface, const Grid& grid,
                              const PoissonOptions& options) {
  const LineSplat splat(iface, grid);
  return solve_potential(splat.splat(phi), options);
}

double nonlocal_pairing(std::span<const double> phi, std::span<const double> psi,
                        const Interface& iface, const Grid& grid) {
  const LineSplat splat(iface, grid);
  const ScalarField w = solve_potential(splat.splat(phi));
  const std::vector<double> g = splat.gather(w);
  double s = splat.self_interaction(phi, psi);
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * psi[i];
  return s;
}

}  // namespace okstab

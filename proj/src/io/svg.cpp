#include "okstab/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>


namespace okstab::io {

namespace {

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Maps container coordinates to a square-ish canvas with y pointing up.
struct Frame {
  double scale;
  double margin = 20.0;
  double lx;
  double ly;
  double px(double x) const { return margin + scale * x; }
  double py(double y) const { return margin + scale * (ly - y); }
  double width() const { return 2 * margin + scale * lx; }
  double height() const { return 2 * margin + scale * ly; }
};

Frame frame_for(const DomainSpec& d) {
  return Frame{480.0 / std::max(d.lx, d.ly), 20.0, d.lx, d.ly};
}

std::string header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
}

std::string container(const Frame& f, const DomainSpec& d) {
  std::ostringstream s;
  s << "<rect x=\"" << num(f.px(0)) << "\" y=\"" << num(f.py(d.ly)) << "\" width=\"" << num(f.scale * d.lx)
    << "\" height=\"" << num(f.scale * d.ly) << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\""
    << (d.periodic() ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
  return s.str();
}

std::string polyline(const Frame& f, const std::vector<Vec2>& pts, bool closed, const std::string& colour,
                     double width, double opacity = 1.0) {
  std::ostringstream s;
  s << (closed ? "<polygon" : "<polyline") << " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) s << (i ? " " : "") << num(f.px(pts[i].x)) << "," << num(f.py(pts[i].y));
  s << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << num(width) << "\" stroke-opacity=\""
    << num(opacity) << "\"/>\n";
  return s.str();
}

std::string colour_of(double t) {
  // t in [-1, 1]: blue, white, red
  t = std::clamp(t, -1.0, 1.0);
  int r, g, b;
  if (t < 0) {
    r = static_cast<int>(std::lround(255 * (1 + t)));
    g = r;
    b = 255;
  } else {
    r = 255;
    g = static_cast<int>(std::lround(255 * (1 - t)));
    b = g;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string svg_interface(const Interface& iface, const DomainSpec& domain, std::size_t arrow_stride) {
  const Frame f = frame_for(domain);
  std::string s = header(f.width(), f.height());
  s += container(f, domain);
  s += polyline(f, iface.nodes(), !iface.is_chord(), palette[0], 2.0);
  const std::vector<Vec2> nu = iface.normals();
  const double len = 0.04 * std::max(domain.lx, domain.ly);
  for (std::size_t i = 0; i < iface.size(); i += std::max<std::size_t>(1, arrow_stride)) {
    const Vec2 a = iface.nodes()[i];
    const Vec2 b = a + len * nu[i];
    s += "<line x1=\"" + num(f.px(a.x)) + "\" y1=\"" + num(f.py(a.y)) + "\" x2=\"" + num(f.px(b.x)) + "\" y2=\"" +
         num(f.py(b.y)) + "\" stroke=\"" + palette[1] + "\" stroke-width=\"1\"/>\n";
    s += "<circle cx=\"" + num(f.px(b.x)) + "\" cy=\"" + num(f.py(b.y)) + "\" r=\"1.5\" fill=\"" + palette[1] + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string svg_snapshots(const std::vector<Interface>& snapshots, const DomainSpec& domain) {
  const Frame f = frame_for(domain);
  std::string s = header(f.width(), f.height());
  s += container(f, domain);
  const std::size_t n = snapshots.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double opacity = n == 1 ? 1.0 : 0.2 + 0.8 * static_cast<double>(k) / (n - 1);
    s += polyline(f, snapshots[k].nodes(), !snapshots[k].is_chord(), palette[0], 1.5, opacity);
  }
  s += "</svg>\n";
  return s;
}

std::string svg_heatmap(const ScalarField& field, const std::string& title, int max_cells) {
  const Grid& g = field.grid();
  const DomainSpec& d = g.spec();
  const int bx = (g.nx() + max_cells - 1) / max_cells;
  const int by = (g.ny() + max_cells - 1) / max_cells;
  const int mx = (g.nx() + bx - 1) / bx;
  const int my = (g.ny() + by - 1) / by;
  std::vector<double> block(static_cast<std::size_t>(mx) * my, 0.0);
  std::vector<int> count(block.size(), 0);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t b = static_cast<std::size_t>(j / by) * mx + i / bx;
      block[b] += field.at(i, j);
      ++count[b];
    }
  }
  double peak = 0.0;
  for (std::size_t b = 0; b < block.size(); ++b) {
    block[b] /= count[b];
    peak = std::max(peak, std::abs(block[b]));
  }
  if (peak == 0.0) peak = 1.0;
  Frame f = frame_for(d);
  f.margin = 30.0;
  std::ostringstream s;
  s << header(f.width(), f.height());
  s << "<text x=\"" << num(f.margin) << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">" << escape(title)
    << " (max |value| " << num(peak) << ")</text>\n";
  const double w = f.scale * bx * g.hx();
  const double h = f.scale * by * g.hy();
  for (int j = 0; j < my; ++j) {
    for (int i = 0; i < mx; ++i) {
      const double x0 = i * bx * g.hx();
      const double y1 = std::min(d.ly, (j + 1) * by * g.hy());
      s << "<rect x=\"" << num(f.px(x0)) << "\" y=\"" << num(f.py(y1)) << "\" width=\"" << num(w + 0.3)
        << "\" height=\"" << num(h + 0.3) << "\" fill=\"" << colour_of(block[static_cast<std::size_t>(j) * mx + i] / peak)
        << "\"/>\n";
    }
  }
  s << container(f, d) << "</svg>\n";
  return s.str();
}

std::string svg_mode_overlay(const Interface& iface, const DomainSpec& domain, std::span<const double> mode) {
  const Frame f = frame_for(domain);
  double peak = 0.0;
  for (double m : mode) peak = std::max(peak, std::abs(m));
  const double scale = peak > 0.0 ? 0.08 * std::min(domain.lx, domain.ly) / peak : 0.0;
  const std::vector<Vec2> nu = iface.normals();
  std::vector<Vec2> moved(iface.size());
  for (std::size_t i = 0; i < iface.size(); ++i) moved[i] = iface.nodes()[i] + scale * mode[i] * nu[i];
  std::string s = header(f.width(), f.height());
  s += container(f, domain);
  s += polyline(f, iface.nodes(), !iface.is_chord(), palette[0], 2.0);
  s += polyline(f, moved, !iface.is_chord(), palette[1], 1.5);
  s += "</svg>\n";
  return s;
}

std::string svg_plot(const PlotAxes& axes, const std::vector<PlotSeries>& series) {
  constexpr double W = 560, H = 400, L = 70, R = 20, T = 35, B = 50;
  auto tx = [&](double v) { return axes.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return axes.log_y ? std::log10(v) : v; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& se : series) {
    for (std::size_t i = 0; i < se.x.size(); ++i) {
      const double a = tx(se.x[i]);
      const double b = ty(se.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      x0 = std::min(x0, a);
      x1 = std::max(x1, a);
      y0 = std::min(y0, b);
      y1 = std::max(y1, b);
    }
  }
  if (!(x1 > x0)) {
    x0 = std::isfinite(x0) ? x0 - 1 : 0;
    x1 = x0 + 2;
  }
  if (!(y1 > y0)) {
    y0 = std::isfinite(y0) ? y0 - 1 : 0;
    y1 = y0 + 2;
  }
  auto px = [&](double v) { return L + (W - L - R) * (tx(v) - x0) / (x1 - x0); };
  auto py = [&](double v) { return H - B - (H - T - B) * (ty(v) - y0) / (y1 - y0); };
  std::ostringstream s;
  s << header(W, H);
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  s << "<text x=\"" << L << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << escape(axes.title)
    << "</text>\n";
  s << "<text x=\"" << (W + L) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"12\">" << escape(axes.x_label) << (axes.log_x ? " (log10)" : "") << "</text>\n";
  s << "<text x=\"16\" y=\"" << (H - B + T) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"12\" transform=\"rotate(-90 16 " << (H - B + T) / 2 << ")\">" << escape(axes.y_label)
    << (axes.log_y ? " (log10)" : "") << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4;
    const double fy = y0 + (y1 - y0) * k / 4;
    const double gx = L + (W - L - R) * k / 4;
    const double gy = H - B - (H - T - B) * k / 4;
    s << "<text x=\"" << num(gx) << "\" y=\"" << H - B + 15 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"10\">" << num(fx) << "</text>\n";
    s << "<text x=\"" << L - 5 << "\" y=\"" << num(gy + 3) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
      << "font-size=\"10\">" << num(fy) << "</text>\n";
  }
  if (y0 < 0 && y1 > 0 && !axes.log_y) {
    const double zy = H - B - (H - T - B) * (0 - y0) / (y1 - y0);
    s << "<line x1=\"" << L << "\" y1=\"" << num(zy) << "\" x2=\"" << W - R << "\" y2=\"" << num(zy)
      << "\" stroke=\"#999\" stroke-dasharray=\"3 3\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& se = series[k];
    const char* colour = palette[k % std::size(palette)];
    if (se.markers) {
      for (std::size_t i = 0; i < se.x.size(); ++i) {
        if (!std::isfinite(tx(se.x[i])) || !std::isfinite(ty(se.y[i]))) continue;
        s << "<circle cx=\"" << num(px(se.x[i])) << "\" cy=\"" << num(py(se.y[i])) << "\" r=\"2.5\" fill=\"" << colour
          << "\" fill-opacity=\"0.7\"/>\n";
      }
    } else {
      s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < se.x.size(); ++i) {
        if (!std::isfinite(tx(se.x[i])) || !std::isfinite(ty(se.y[i]))) continue;
        s << (first ? "" : " ") << num(px(se.x[i])) << "," << num(py(se.y[i]));
        first = false;
      }
      s << "\"/>\n";
    }
    s << "<text x=\"" << W - R - 5 << "\" y=\"" << T + 15 + 14 * k << "\" text-anchor=\"end\" "
      << "font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colour << "\">" << escape(se.name) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace okstab::io

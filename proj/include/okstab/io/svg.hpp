#pragma once

#include <span>
#include <string>
#include <vector>

#include "okstab/domain.hpp"
#include "okstab/field.hpp"
#include "okstab/interface.hpp"

namespace okstab::io {

/// The interface inside its container, with outward normals drawn at every
/// `arrow_stride`-th node.
std::string svg_interface(const Interface& iface, const DomainSpec& domain, std::size_t arrow_stride = 4);

/// Several interfaces (flow snapshots) drawn over each other, oldest faintest.
std::string svg_snapshots(const std::vector<Interface>& snapshots, const DomainSpec& domain);

/// Diverging colour map of a cell field, block-averaged to at most
/// `max_cells` cells per axis.
std::string svg_heatmap(const ScalarField& f, const std::string& title, int max_cells = 128);

/// The interface and its image under x + scale * mode(x) nu(x).
std::string svg_mode_overlay(const Interface& iface, const DomainSpec& domain, std::span<const double> mode);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // points instead of a line
};

struct PlotAxes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

std::string svg_plot(const PlotAxes& axes, const std::vector<PlotSeries>& series);

}  // namespace okstab::io

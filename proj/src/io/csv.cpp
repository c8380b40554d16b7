#include "okstab/io/csv.hpp"

#include <fstream>

#include "okstab/error.hpp"
#include "okstab/io/json_out.hpp"

namespace okstab::io {

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cli", "cannot write " + path.string());
  for (std::size_t c = 0; c < header.size(); ++c) f << (c ? "," : "") << header[c];
  f << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw Error("cli", "csv row width does not match its header");
    for (std::size_t c = 0; c < row.size(); ++c) f << (c ? "," : "") << format_number(row[c]);
    f << "\n";
  }
  if (!f) throw Error("cli", "write failed for " + path.string());
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<std::vector<double>> rows;
  rows.reserve(g.cell_count());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 c = g.center(i, j);
      rows.push_back({static_cast<double>(i), static_cast<double>(j), c.x, c.y, f.at(i, j)});
    }
  }
  write_csv(path, {"i", "j", "x", "y", "value"}, rows);
}

void write_interface_csv(const std::filesystem::path& path, const Interface& iface,
                         const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
  std::vector<std::string> header = {"index", "s", "x", "y", "nu_x", "nu_y", "curvature"};
  for (const auto& [name, values] : extra) {
    if (values.size() != iface.size()) throw Error("cli", "series " + name + " does not match the node count");
    header.push_back(name);
  }
  const std::vector<double> s = iface.arclength();
  const std::vector<Vec2> nu = iface.normals();
  const std::vector<double> k = curvature(iface);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < iface.size(); ++i) {
    const Vec2 p = iface.nodes()[i];
    std::vector<double> row = {static_cast<double>(i), s[i], p.x, p.y, nu[i].x, nu[i].y, k[i]};
    for (const auto& e : extra) row.push_back(e.second[i]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

}  // namespace okstab::io

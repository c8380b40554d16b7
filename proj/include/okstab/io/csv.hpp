#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "okstab/field.hpp"
#include "okstab/interface.hpp"

namespace okstab::io {

/// Header row plus numeric rows, numbers at 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Columns i, j, x, y, value.
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);

/// Columns index, s, x, y, nu_x, nu_y, curvature and one column per extra
/// nodal series.
void write_interface_csv(const std::filesystem::path& path, const Interface& iface,
                         const std::vector<std::pair<std::string, std::vector<double>>>& extra = {});

}  // namespace okstab::io

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace okstab::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits; non-finite values become null.
std::string format_number(double x);

/// Serialises with keys in insertion order and every floating-point number
/// printed by format_number, so equal documents give equal bytes.
std::string dump_json(const Json& j);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace okstab::io

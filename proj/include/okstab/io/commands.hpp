#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "okstab/io/scenario.hpp"

namespace okstab::io {

inline constexpr const char* version = "0.1.0";

const std::vector<std::string>& command_names();

/// Runs one command and writes report.json, meta.json, CSVs and SVGs into
/// the scenario's output directory. Returns the process exit status: 0 on
/// success, 2 when the stability command finds the state unstable. Errors
/// are thrown as okstab::Error.
int run_command(const std::string& command, const Scenario& scenario, std::ostream& log);

}  // namespace okstab::io

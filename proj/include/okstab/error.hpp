#pragma once

#include <stdexcept>
#include <string>

namespace okstab {

/// Numerical or contract failure raised by any module. The message is
/// prefixed with the originating module so the CLI can forward it verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace okstab

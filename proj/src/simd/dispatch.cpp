#include <cstdlib>
#include <string_view>

#include "okstab/simd/kernels.hpp"

namespace okstab::simd {

namespace {

const KernelTable& select() {
  const char* env = std::getenv("OKSTAB_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
  if (const KernelTable* t = avx2_kernels(); t != nullptr && cpu_supports_avx2()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace okstab::simd

#include <cstdlib>
#include <string_view>

#include "macsim/kernels.hpp"

namespace macsim::kernels {

bool avx2_supported() {
#if MACSIM_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

const KernelTable& select() {
  const char* forced = std::getenv("MACSIM_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar::table();
#if MACSIM_HAVE_AVX2
  if (avx2_supported()) return avx2::table();
#endif
  return scalar::table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& t = select();
  return t;
}

}  // namespace macsim::kernels

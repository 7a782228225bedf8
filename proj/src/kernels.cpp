#include "qsel/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace qsel::kernels {

namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Selection {
  const Ops* ops;
  const char* name;
};

Selection select_backend() {
  const char* forced = std::getenv("QSEL_KERNELS");
  if (forced && std::strcmp(forced, "scalar") == 0) {
    return {&scalar_ops(), "scalar"};
  }
  const Ops* avx2 = avx2_ops();
  if (avx2 && cpu_has_avx2()) {
    if (!forced || std::strcmp(forced, "avx2") == 0) {
      return {avx2, "avx2"};
    }
  }
  return {&scalar_ops(), "scalar"};
}

const Selection& selection() {
  static const Selection s = select_backend();
  return s;
}

}  // namespace

const Ops& active() { return *selection().ops; }

const char* active_name() { return selection().name; }

}  // namespace qsel::kernels

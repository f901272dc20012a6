#include <atomic>
#include <cstdlib>
#include <cstring>

#include "holotraj/kernels.hpp"

namespace holotraj::kernels {
namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* pick_default() {
  if (const char* env = std::getenv("HOLOTRAJ_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
    if (std::strcmp(env, "avx2") == 0 && avx2_supported())
      return avx2_ops_or_null();
  }
  if (avx2_supported()) return avx2_ops_or_null();
  return &scalar_ops();
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return avx2_ops_or_null() != nullptr && __builtin_cpu_supports("avx2") &&
         __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (!ops) {
    ops = pick_default();
    const Ops* expected = nullptr;
    if (!g_active.compare_exchange_strong(expected, ops,
                                          std::memory_order_acq_rel))
      ops = expected;
  }
  return *ops;
}

void set_backend(Backend b) {
  const Ops* ops = &scalar_ops();
  if (b == Backend::avx2) {
    if (!avx2_supported()) return;  // keep current selection
    ops = avx2_ops_or_null();
  }
  g_active.store(ops, std::memory_order_release);
}

Backend active_backend() {
  return &active() == &scalar_ops() ? Backend::scalar : Backend::avx2;
}

}  // namespace holotraj::kernels

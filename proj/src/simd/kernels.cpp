#include "ruqkit/simd/kernels.hpp"

#include <atomic>

namespace ruqkit::simd {

#if !defined(RUQKIT_HAVE_AVX2)
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

const KernelTable* best_available() {
  if (const auto* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*> g_selected{nullptr};

}  // namespace

const KernelTable& active() {
  if (const auto* t = g_selected.load(std::memory_order_acquire)) return *t;
  static const KernelTable* automatic = best_available();
  return *automatic;
}

bool select(Isa isa) {
  const KernelTable* t = isa == Isa::scalar ? &scalar_kernels() : avx2_kernels();
  if (!t) return false;
  g_selected.store(t, std::memory_order_release);
  return true;
}

void reset_selection() { g_selected.store(nullptr, std::memory_order_release); }

std::string_view to_string(Isa isa) { return isa == Isa::scalar ? "scalar" : "avx2"; }

}  // namespace ruqkit::simd

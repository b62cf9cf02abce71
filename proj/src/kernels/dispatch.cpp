#include <cstdlib>
#include <string_view>

#include "spatia/kernels.hpp"

namespace spatia::kernels {

#if defined(SPATIA_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(SPATIA_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

const KernelTable* avx2() {
#if defined(SPATIA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon() {
#if defined(SPATIA_HAVE_NEON)
  return &kNeonTable;
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar()};
  if (auto* k = avx2()) out.push_back(k);
  if (auto* k = neon()) out.push_back(k);
  return out;
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("SPATIA_KERNELS")) {
    const std::string_view want(env);
    for (const auto* k : available())
      if (want == k->name) return *k;
  }
  if (auto* k = avx2()) return *k;
  if (auto* k = neon()) return *k;
  return scalar();
}

} // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

} // namespace spatia::kernels

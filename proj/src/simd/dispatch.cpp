#include <atomic>
#include <cstdlib>
#include <string>

#include "simd/kernels.hpp"
#include "vip/error.hpp"

namespace vip::simd {
namespace {

bool cpu_has_avx2() {
#if defined(VIP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<Level>& active_slot() {
  static std::atomic<Level> level{detected_level()};
  return level;
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Scalar:
      return "scalar";
    case Level::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool supported(Level level) {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

std::vector<Level> supported_levels() {
  std::vector<Level> out{Level::Scalar};
  if (supported(Level::Avx2)) out.push_back(Level::Avx2);
  return out;
}

Level detected_level() {
  const Level best = supported(Level::Avx2) ? Level::Avx2 : Level::Scalar;
  if (const char* env = std::getenv("VIP_SIMD")) {
    const std::string name{env};
    if (name == "scalar") return Level::Scalar;
    if (name == "avx2" && supported(Level::Avx2)) return Level::Avx2;
  }
  return best;
}

Level active_level() { return active_slot().load(std::memory_order_relaxed); }

void set_active_level(Level level) {
  if (!supported(level)) {
    throw Error(ErrorCode::BadParam,
                "simd level '" + std::string(to_string(level)) + "' not supported");
  }
  active_slot().store(level, std::memory_order_relaxed);
}

const Kernels& kernels(Level level) {
#if defined(VIP_HAVE_AVX2)
  if (level == Level::Avx2) return avx2_kernels();
#endif
  (void)level;
  return scalar_kernels();
}

}  // namespace vip::simd

#pragma once

#include <string_view>
#include <vector>

// Runtime selection of the data-parallel kernel set. Every level computes
// bit-identical results; the scalar set is the reference.
namespace vip::simd {

enum class Level { Scalar, Avx2 };

std::string_view to_string(Level level);

bool supported(Level level);
std::vector<Level> supported_levels();

// Best supported level, unless the VIP_SIMD environment variable names a
// lower supported one ("scalar", "avx2").
Level detected_level();

Level active_level();
// Throws Error(BadParam) when the level is not supported on this CPU/build.
void set_active_level(Level level);

class ScopedLevel {
 public:
  explicit ScopedLevel(Level level) : previous_(active_level()) { set_active_level(level); }
  ~ScopedLevel() { set_active_level(previous_); }
  ScopedLevel(const ScopedLevel&) = delete;
  ScopedLevel& operator=(const ScopedLevel&) = delete;

 private:
  Level previous_;
};

}  // namespace vip::simd

#pragma once

#include <cstddef>
#include <cstdint>

#include "vip/raster.hpp"
#include "vip/simd.hpp"

namespace vip::simd {

// Data-parallel inner loops behind raster-core and edge-detect. Each level
// must reproduce the scalar results bit for bit: same operation order, no
// fused multiply-add.
struct Kernels {
  // rgb: `count` interleaved RGB triples; out: 0/255 per pixel.
  void (*segment)(const std::uint8_t* rgb, std::size_t count, const HsvRange& range,
                  std::uint8_t* out);

  // dst[x] = sum_{k=0}^{2r} w[k] * src[clamp(x + k - r, 0, width - 1)],
  // accumulated in k order starting from 0.0f.
  void (*convolve_row)(const float* src, int width, const float* weights, int radius,
                       float* dst);

  // dst[x] = sum_{k=0}^{taps-1} w[k] * rows[k][x], accumulated in k order.
  void (*convolve_cols)(const float* const* rows, int taps, const float* weights, int width,
                        float* dst);

  // One output row of the 3x3 Sobel pair from three clamped input rows.
  //   gx = (ur + 2 mr + dr) - (ul + 2 ml + dl)
  //   gy = (dl + 2 dc + dr) - (ul + 2 uc + ur)
  //   mag = sqrt(gx^2 + gy^2)
  // Column neighbours clamp at the row ends.
  void (*sobel_row)(const float* up, const float* mid, const float* down, int width, float* gx,
                    float* gy, float* mag);
};

const Kernels& scalar_kernels();
#if defined(VIP_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif

const Kernels& kernels(Level level);
inline const Kernels& active() { return kernels(active_level()); }

}  // namespace vip::simd

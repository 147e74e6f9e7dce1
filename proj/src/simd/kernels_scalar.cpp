#include <algorithm>
#include <cmath>

#include "simd/kernels.hpp"

namespace vip::simd {
namespace {

void segment_scalar(const std::uint8_t* rgb, std::size_t count, const HsvRange& range,
                    std::uint8_t* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const Rgb px{rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]};
    out[i] = range.contains(rgb_to_hsv(px)) ? BinaryMask::kOn : 0;
  }
}

void convolve_row_scalar(const float* src, int width, const float* weights, int radius,
                         float* dst) {
  const int taps = 2 * radius + 1;
  for (int x = 0; x < width; ++x) {
    float acc = 0.0f;
    for (int k = 0; k < taps; ++k) {
      const int sx = std::clamp(x + k - radius, 0, width - 1);
      acc = acc + weights[k] * src[sx];
    }
    dst[x] = acc;
  }
}

void convolve_cols_scalar(const float* const* rows, int taps, const float* weights, int width,
                          float* dst) {
  for (int x = 0; x < width; ++x) {
    float acc = 0.0f;
    for (int k = 0; k < taps; ++k) acc = acc + weights[k] * rows[k][x];
    dst[x] = acc;
  }
}

void sobel_row_scalar(const float* up, const float* mid, const float* down, int width, float* gx,
                      float* gy, float* mag) {
  for (int x = 0; x < width; ++x) {
    const int l = std::max(x - 1, 0);
    const int r = std::min(x + 1, width - 1);
    const float sx = ((up[r] + 2.0f * mid[r]) + down[r]) - ((up[l] + 2.0f * mid[l]) + down[l]);
    const float sy = ((down[l] + 2.0f * down[x]) + down[r]) - ((up[l] + 2.0f * up[x]) + up[r]);
    gx[x] = sx;
    gy[x] = sy;
    mag[x] = std::sqrt(sx * sx + sy * sy);
  }
}

constexpr Kernels kScalar{
    segment_scalar,
    convolve_row_scalar,
    convolve_cols_scalar,
    sobel_row_scalar,
};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace vip::simd

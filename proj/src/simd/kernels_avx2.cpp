// Compiled with -mavx2 only; never called unless the CPU reports AVX2.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "simd/kernels.hpp"

namespace vip::simd {
namespace {

// Four pixels per step in double precision, mirroring rgb_to_hsv exactly.
void segment_avx2(const std::uint8_t* rgb, std::size_t count, const HsvRange& range,
                  std::uint8_t* out) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d c60 = _mm256_set1_pd(60.0);
  const __m256d c360 = _mm256_set1_pd(360.0);
  const __m256d c2 = _mm256_set1_pd(2.0);
  const __m256d c4 = _mm256_set1_pd(4.0);
  const __m256d c255 = _mm256_set1_pd(255.0);
  const __m256d hue_lo = _mm256_set1_pd(range.hue_min);
  const __m256d hue_hi = _mm256_set1_pd(range.hue_max);
  const __m256d sat_lo = _mm256_set1_pd(range.sat_min);
  const __m256d sat_hi = _mm256_set1_pd(range.sat_max);
  const __m256d val_lo = _mm256_set1_pd(range.val_min);
  const __m256d val_hi = _mm256_set1_pd(range.val_max);
  const bool wraps = range.hue_min > range.hue_max;

  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const std::uint8_t* p = rgb + 3 * i;
    const __m256d r = _mm256_cvtepi32_pd(_mm_setr_epi32(p[0], p[3], p[6], p[9]));
    const __m256d g = _mm256_cvtepi32_pd(_mm_setr_epi32(p[1], p[4], p[7], p[10]));
    const __m256d b = _mm256_cvtepi32_pd(_mm_setr_epi32(p[2], p[5], p[8], p[11]));

    const __m256d mx = _mm256_max_pd(r, _mm256_max_pd(g, b));
    const __m256d mn = _mm256_min_pd(r, _mm256_min_pd(g, b));
    const __m256d delta = _mm256_sub_pd(mx, mn);
    const __m256d achromatic = _mm256_cmp_pd(delta, zero, _CMP_EQ_OQ);

    const __m256d v = _mm256_div_pd(mx, c255);
    __m256d s = _mm256_div_pd(delta, mx);

    __m256d h_r = _mm256_mul_pd(c60, _mm256_div_pd(_mm256_sub_pd(g, b), delta));
    h_r = _mm256_blendv_pd(h_r, _mm256_add_pd(h_r, c360), _mm256_cmp_pd(h_r, zero, _CMP_LT_OQ));
    const __m256d h_g =
        _mm256_mul_pd(c60, _mm256_add_pd(_mm256_div_pd(_mm256_sub_pd(b, r), delta), c2));
    const __m256d h_b =
        _mm256_mul_pd(c60, _mm256_add_pd(_mm256_div_pd(_mm256_sub_pd(r, g), delta), c4));

    const __m256d is_r = _mm256_cmp_pd(mx, r, _CMP_EQ_OQ);
    const __m256d is_g = _mm256_cmp_pd(mx, g, _CMP_EQ_OQ);
    __m256d h = _mm256_blendv_pd(h_b, h_g, is_g);
    h = _mm256_blendv_pd(h, h_r, is_r);
    h = _mm256_blendv_pd(h, zero, achromatic);
    s = _mm256_blendv_pd(s, zero, achromatic);

    const __m256d h_ge = _mm256_cmp_pd(h, hue_lo, _CMP_GE_OQ);
    const __m256d h_le = _mm256_cmp_pd(h, hue_hi, _CMP_LE_OQ);
    const __m256d hue_ok = wraps ? _mm256_or_pd(h_ge, h_le) : _mm256_and_pd(h_ge, h_le);
    const __m256d s_ok = _mm256_and_pd(_mm256_cmp_pd(s, sat_lo, _CMP_GE_OQ),
                                       _mm256_cmp_pd(s, sat_hi, _CMP_LE_OQ));
    const __m256d v_ok = _mm256_and_pd(_mm256_cmp_pd(v, val_lo, _CMP_GE_OQ),
                                       _mm256_cmp_pd(v, val_hi, _CMP_LE_OQ));
    const int bits = _mm256_movemask_pd(_mm256_and_pd(hue_ok, _mm256_and_pd(s_ok, v_ok)));
    out[i + 0] = (bits & 1) ? BinaryMask::kOn : 0;
    out[i + 1] = (bits & 2) ? BinaryMask::kOn : 0;
    out[i + 2] = (bits & 4) ? BinaryMask::kOn : 0;
    out[i + 3] = (bits & 8) ? BinaryMask::kOn : 0;
  }
  if (i < count) scalar_kernels().segment(rgb + 3 * i, count - i, range, out + i);
}

void convolve_row_avx2(const float* src, int width, const float* weights, int radius,
                       float* dst) {
  const int taps = 2 * radius + 1;
  auto scalar_at = [&](int x) {
    float acc = 0.0f;
    for (int k = 0; k < taps; ++k) {
      const int sx = std::clamp(x + k - radius, 0, width - 1);
      acc = acc + weights[k] * src[sx];
    }
    dst[x] = acc;
  };

  // Interior lanes read [x - r, x + 7 + r] without clamping.
  const int first = std::min(radius, width);
  const int last = width - radius;  // exclusive end of unclamped outputs
  int x = 0;
  for (; x < first; ++x) scalar_at(x);
  for (; x + 8 <= last; x += 8) {
    __m256 acc = _mm256_setzero_ps();
    for (int k = 0; k < taps; ++k) {
      const __m256 w = _mm256_set1_ps(weights[k]);
      acc = _mm256_add_ps(acc, _mm256_mul_ps(w, _mm256_loadu_ps(src + x + k - radius)));
    }
    _mm256_storeu_ps(dst + x, acc);
  }
  for (; x < width; ++x) scalar_at(x);
}

void convolve_cols_avx2(const float* const* rows, int taps, const float* weights, int width,
                        float* dst) {
  int x = 0;
  for (; x + 8 <= width; x += 8) {
    __m256 acc = _mm256_setzero_ps();
    for (int k = 0; k < taps; ++k) {
      const __m256 w = _mm256_set1_ps(weights[k]);
      acc = _mm256_add_ps(acc, _mm256_mul_ps(w, _mm256_loadu_ps(rows[k] + x)));
    }
    _mm256_storeu_ps(dst + x, acc);
  }
  for (; x < width; ++x) {
    float acc = 0.0f;
    for (int k = 0; k < taps; ++k) acc = acc + weights[k] * rows[k][x];
    dst[x] = acc;
  }
}

void sobel_row_avx2(const float* up, const float* mid, const float* down, int width, float* gx,
                    float* gy, float* mag) {
  auto scalar_at = [&](int x) {
    const int l = std::max(x - 1, 0);
    const int r = std::min(x + 1, width - 1);
    const float sx = ((up[r] + 2.0f * mid[r]) + down[r]) - ((up[l] + 2.0f * mid[l]) + down[l]);
    const float sy = ((down[l] + 2.0f * down[x]) + down[r]) - ((up[l] + 2.0f * up[x]) + up[r]);
    gx[x] = sx;
    gy[x] = sy;
    mag[x] = std::sqrt(sx * sx + sy * sy);
  };

  const __m256 two = _mm256_set1_ps(2.0f);
  int x = 0;
  if (width > 0) scalar_at(x++);
  for (; x + 8 <= width - 1; x += 8) {
    const __m256 ul = _mm256_loadu_ps(up + x - 1);
    const __m256 uc = _mm256_loadu_ps(up + x);
    const __m256 ur = _mm256_loadu_ps(up + x + 1);
    const __m256 ml = _mm256_loadu_ps(mid + x - 1);
    const __m256 mr = _mm256_loadu_ps(mid + x + 1);
    const __m256 dl = _mm256_loadu_ps(down + x - 1);
    const __m256 dc = _mm256_loadu_ps(down + x);
    const __m256 dr = _mm256_loadu_ps(down + x + 1);

    const __m256 right = _mm256_add_ps(_mm256_add_ps(ur, _mm256_mul_ps(two, mr)), dr);
    const __m256 left = _mm256_add_ps(_mm256_add_ps(ul, _mm256_mul_ps(two, ml)), dl);
    const __m256 bottom = _mm256_add_ps(_mm256_add_ps(dl, _mm256_mul_ps(two, dc)), dr);
    const __m256 top = _mm256_add_ps(_mm256_add_ps(ul, _mm256_mul_ps(two, uc)), ur);
    const __m256 sx = _mm256_sub_ps(right, left);
    const __m256 sy = _mm256_sub_ps(bottom, top);
    _mm256_storeu_ps(gx + x, sx);
    _mm256_storeu_ps(gy + x, sy);
    _mm256_storeu_ps(mag + x, _mm256_sqrt_ps(_mm256_add_ps(_mm256_mul_ps(sx, sx),
                                                           _mm256_mul_ps(sy, sy))));
  }
  for (; x < width; ++x) scalar_at(x);
}

constexpr Kernels kAvx2{
    segment_avx2,
    convolve_row_avx2,
    convolve_cols_avx2,
    sobel_row_avx2,
};

}  // namespace

const Kernels& avx2_kernels() { return kAvx2; }

}  // namespace vip::simd

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "vip/geometry.hpp"
#include "vip/raster.hpp"

namespace vip {

class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, float fill = 0.0f);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  float& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  float at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  float* row(int y) { return values_.data() + static_cast<std::size_t>(y) * width_; }
  const float* row(int y) const { return values_.data() + static_cast<std::size_t>(y) * width_; }
  std::span<float> values() noexcept { return values_; }
  std::span<const float> values() const noexcept { return values_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

// Rec. 601 luma scaled to [0, 1].
GrayImage to_gray(const Frame& frame);

struct CannyParams {
  double sigma = 1.0;
  double t_high = 0.5;  // on raw Sobel magnitude of a [0,1] image
  double ratio = 2.5;   // high:low

  double t_low() const noexcept { return t_high / ratio; }
  // Throws BadParam for sigma <= 0, t_high <= 0 or ratio <= 1; warns when
  // ratio leaves [2, 3].
  void validate() const;
};

// Normalized weights w[0..2r], r = ceil(3 sigma).
std::vector<float> gaussian_kernel(double sigma);

// Separable, clamp-to-edge. Throws BadParam for sigma <= 0.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

struct Gradients {
  GrayImage gx;
  GrayImage gy;
  GrayImage magnitude;
  GrayImage direction;  // radians, atan2(gy, gx)
};

// 3x3 Sobel with clamp-to-edge borders. Throws ImageTooSmall below 3x3.
Gradients sobel_gradients(const GrayImage& img);

// Magnitude kept where it is a directional maximum (4 direction bins):
// strictly greater than the backward neighbour and not less than the forward
// one, so plateaus of two equal pixels keep exactly one. Zero elsewhere.
GrayImage non_max_suppression(const Gradients& grad);

// Candidates >= t_low grow from seeds > t_high through 8-connectivity.
BinaryMask hysteresis(const GrayImage& suppressed, double t_low, double t_high);

struct CannyStages {
  GrayImage blurred;
  Gradients gradients;
  GrayImage suppressed;
  BinaryMask edges;
};

CannyStages canny_stages(const GrayImage& img, const CannyParams& params);
BinaryMask canny(const GrayImage& img, const CannyParams& params);

// Corners TL, TR, BR, BL: positive shoelace area in frame coordinates
// (counter-clockwise in the y-up sense), starting at the top-left corner.
struct DisplayQuad {
  std::array<Vec2, 4> corners{};
  double confidence = 1.0;

  double signed_area() const noexcept;
  bool simple() const noexcept;
};

// Orders four points as a DisplayQuad (angle about the centroid, then the
// corner with smallest x + y first).
DisplayQuad canonical_quad(std::array<Vec2, 4> points, double confidence = 1.0);

// Douglas-Peucker on a closed polyline; returns retained vertices in order.
std::vector<Vec2> simplify_closed(std::span<const Vec2> contour, double tolerance);

// Moore-neighbour trace of the outer boundary of the 8-connected region that
// contains `start` (the region's first pixel in raster order). Pixel centers.
std::vector<Vec2> trace_outer_contour(const BinaryMask& region, PixelCoord start);

struct QuadDetectOptions {
  double simplify_fraction = 0.02;  // of contour perimeter
  double min_area_fraction = 0.05;  // of frame area
  std::size_t max_candidates = 8;
  double miss_decay = 0.8;
};

// Fresh detection only: largest closed contour simplified to four vertices.
std::optional<DisplayQuad> detect_display_quad(const BinaryMask& edges,
                                               const QuadDetectOptions& options = {});

// Detection, else `prev` with confidence decayed, else nothing.
std::optional<DisplayQuad> extract_display_quad(const BinaryMask& edges,
                                                const std::optional<DisplayQuad>& prev,
                                                const QuadDetectOptions& options = {});

// Per-session quad track: decays on a miss and drops after `max_misses`
// consecutive misses.
class QuadTracker {
 public:
  explicit QuadTracker(QuadDetectOptions options = {}, int max_misses = 5)
      : options_(options), max_misses_(max_misses) {}

  const std::optional<DisplayQuad>& update(const BinaryMask& edges);
  const std::optional<DisplayQuad>& current() const noexcept { return quad_; }
  int misses() const noexcept { return misses_; }

 private:
  QuadDetectOptions options_;
  int max_misses_;
  int misses_ = 0;
  std::optional<DisplayQuad> quad_;
};

}  // namespace vip

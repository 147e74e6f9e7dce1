#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vip/geometry.hpp"

namespace vip {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr bool operator==(Rgb, Rgb) = default;
};
static_assert(sizeof(Rgb) == 3, "Rgb must be a packed byte triple");

// Camera sample: row-major RGB raster tagged with a stream timestamp.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, Rgb fill = {}, std::int64_t timestamp_ms = 0);
  Frame(int width, int height, std::vector<Rgb> pixels, std::int64_t timestamp_ms = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }
  std::int64_t timestamp_ms() const noexcept { return timestamp_ms_; }
  void set_timestamp_ms(std::int64_t t) noexcept { timestamp_ms_ = t; }

  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }
  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<Rgb> pixels() noexcept { return pixels_; }
  std::span<const Rgb> pixels() const noexcept { return pixels_; }
  std::span<const std::uint8_t> bytes() const noexcept {
    return {reinterpret_cast<const std::uint8_t*>(pixels_.data()), pixels_.size() * 3};
  }

  // Pixel equality only; timestamps are stream metadata.
  friend bool operator==(const Frame& a, const Frame& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.pixels_ == b.pixels_;
  }

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
  std::int64_t timestamp_ms_ = 0;
};

struct HsvColor {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;  // [0, 1]
  double v = 0.0;  // [0, 1]
};

// hue_min > hue_max denotes a range that wraps through 0 degrees.
struct HsvRange {
  double hue_min = 0.0;
  double hue_max = 360.0;
  double sat_min = 0.0;
  double sat_max = 1.0;
  double val_min = 0.0;
  double val_max = 1.0;

  bool contains(const HsvColor& c) const noexcept {
    const bool hue_ok = hue_min <= hue_max ? (c.h >= hue_min && c.h <= hue_max)
                                           : (c.h >= hue_min || c.h <= hue_max);
    return hue_ok && c.s >= sat_min && c.s <= sat_max && c.v >= val_min && c.v <= val_max;
  }
  bool valid() const noexcept { return sat_min <= sat_max && val_min <= val_max; }
};

// One byte per pixel, every value 0 or 255.
class BinaryMask {
 public:
  static constexpr std::uint8_t kOn = 255;

  BinaryMask() = default;
  BinaryMask(int width, int height, std::uint8_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::uint8_t& at(int x, int y) { return values_[index(x, y)]; }
  std::uint8_t at(int x, int y) const { return values_[index(x, y)]; }
  bool on(int x, int y) const { return values_[index(x, y)] != 0; }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::size_t count_on() const noexcept;

  std::span<std::uint8_t> values() noexcept { return values_; }
  std::span<const std::uint8_t> values() const noexcept { return values_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> values_;
};

struct PixelCoord {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(PixelCoord, PixelCoord) = default;
  friend constexpr auto operator<=>(PixelCoord a, PixelCoord b) {
    return a.y != b.y ? a.y <=> b.y : a.x <=> b.x;
  }
};

// Inclusive pixel bounds.
struct PixelBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
};

struct Component {
  std::vector<PixelCoord> pixels;  // raster order
  std::size_t area = 0;
  PixelBox bbox;
};

struct OrientedRect {
  Vec2 center;
  double width = 0.0;   // extent along `angle`
  double height = 0.0;  // extent along `angle + 90`
  double angle = 0.0;   // degrees, [0, 90)

  double area() const noexcept { return width * height; }
  // Corners in order: -w/-h, +w/-h, +w/+h, -w/+h along the rect axes.
  std::array<Vec2, 4> corners() const;
  bool contains(Vec2 p, double tolerance = 1e-6) const;
};

HsvColor rgb_to_hsv(Rgb rgb) noexcept;

// Per-pixel HSV range test; 255 where the pixel is inside `range`.
BinaryMask segment(const Frame& frame, const HsvRange& range);

// 8-connected labeling, sorted by area descending (ties keep raster order).
std::vector<Component> connected_components(const BinaryMask& mask);

// Minimum-area enclosing rectangle via rotating calipers on the convex hull.
// Throws Error(EmptyPointSet) for empty input.
OrientedRect min_area_rect(std::span<const Vec2> points);

// Andrew monotone chain; counter-clockwise in a y-up frame (positive shoelace
// area in raw coordinates), collinear points dropped.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

// Integer pixels map to their centers for geometric fitting.
inline Vec2 pixel_center(PixelCoord p) { return {p.x + 0.5, p.y + 0.5}; }

// Fit the min-area rect to the largest component with area >= min_area.
std::optional<OrientedRect> locate_marker(const BinaryMask& mask, std::size_t min_area = 25);

}  // namespace vip

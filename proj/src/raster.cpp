#include "vip/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "simd/kernels.hpp"
#include "vip/error.hpp"

namespace vip {

Frame::Frame(int width, int height, Rgb fill, std::int64_t timestamp_ms)
    : width_(width), height_(height), timestamp_ms_(timestamp_ms) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::BadParam, "frame dimensions must be positive");
  }
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Frame::Frame(int width, int height, std::vector<Rgb> pixels, std::int64_t timestamp_ms)
    : width_(width), height_(height), pixels_(std::move(pixels)), timestamp_ms_(timestamp_ms) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::BadParam, "frame dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::BadParam, "pixel count does not match frame dimensions");
  }
}

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::BadParam, "mask dimensions must be positive");
  }
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                 fill ? kOn : 0);
}

std::size_t BinaryMask::count_on() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](std::uint8_t v) { return v != 0; }));
}

HsvColor rgb_to_hsv(Rgb rgb) noexcept {
  const int r = rgb.r;
  const int g = rgb.g;
  const int b = rgb.b;
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const int delta = mx - mn;
  const double v = mx / 255.0;
  if (delta == 0) return {0.0, 0.0, v};

  const double d = delta;
  const double s = d / mx;
  double h = 0.0;
  if (mx == r) {
    h = 60.0 * ((g - b) / d);
    if (h < 0.0) h += 360.0;
  } else if (mx == g) {
    h = 60.0 * ((b - r) / d + 2.0);
  } else {
    h = 60.0 * ((r - g) / d + 4.0);
  }
  return {h, s, v};
}

BinaryMask segment(const Frame& frame, const HsvRange& range) {
  BinaryMask mask(frame.width(), frame.height());
  simd::active().segment(frame.bytes().data(), frame.pixels().size(), range,
                         mask.values().data());
  return mask;
}

std::vector<Component> connected_components(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<Component> out;
  std::vector<PixelCoord> stack;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.on(x, y) || label[static_cast<std::size_t>(y) * w + x] >= 0) continue;
      const int id = static_cast<int>(out.size());
      Component comp;
      comp.bbox = {x, y, x, y};
      label[static_cast<std::size_t>(y) * w + x] = id;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        comp.pixels.push_back(p);
        comp.bbox.x0 = std::min(comp.bbox.x0, p.x);
        comp.bbox.y0 = std::min(comp.bbox.y0, p.y);
        comp.bbox.x1 = std::max(comp.bbox.x1, p.x);
        comp.bbox.y1 = std::max(comp.bbox.y1, p.y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (!mask.contains(nx, ny) || !mask.on(nx, ny)) continue;
            int& l = label[static_cast<std::size_t>(ny) * w + nx];
            if (l >= 0) continue;
            l = id;
            stack.push_back({nx, ny});
          }
        }
      }
      std::sort(comp.pixels.begin(), comp.pixels.end());
      comp.area = comp.pixels.size();
      out.push_back(std::move(comp));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Component& a, const Component& b) { return a.area > b.area; });
  return out;
}

std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2& p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

std::array<Vec2, 4> OrientedRect::corners() const {
  const double rad = angle * std::numbers::pi / 180.0;
  const Vec2 u{std::cos(rad), std::sin(rad)};
  const Vec2 n{-u.y, u.x};
  const Vec2 hu = 0.5 * width * u;
  const Vec2 hn = 0.5 * height * n;
  return {center - hu - hn, center + hu - hn, center + hu + hn, center - hu + hn};
}

bool OrientedRect::contains(Vec2 p, double tolerance) const {
  const double rad = angle * std::numbers::pi / 180.0;
  const Vec2 u{std::cos(rad), std::sin(rad)};
  const Vec2 n{-u.y, u.x};
  const Vec2 d = p - center;
  return std::abs(dot(d, u)) <= 0.5 * width + tolerance &&
         std::abs(dot(d, n)) <= 0.5 * height + tolerance;
}

namespace {

// Rectangle aligned with `dir` (unit) whose extents along dir / normal are
// [lo_u, hi_u] x [lo_n, hi_n].
OrientedRect make_rect(Vec2 dir, double lo_u, double hi_u, double lo_n, double hi_n) {
  const Vec2 nrm{-dir.y, dir.x};
  OrientedRect rect;
  rect.center = 0.5 * (lo_u + hi_u) * dir + 0.5 * (lo_n + hi_n) * nrm;
  double width = hi_u - lo_u;
  double height = hi_n - lo_n;
  double angle = std::atan2(dir.y, dir.x) * 180.0 / std::numbers::pi;
  // Fold to [0, 90); each quarter turn swaps the roles of width and height.
  double quarters = std::floor(angle / 90.0);
  angle -= 90.0 * quarters;
  if (angle >= 90.0 - 1e-9) {
    angle = 0.0;
    quarters += 1.0;
  }
  if (angle < 1e-9) angle = 0.0;
  if (static_cast<long long>(quarters) % 2 != 0) std::swap(width, height);
  rect.width = width;
  rect.height = height;
  rect.angle = angle;
  return rect;
}

}  // namespace

OrientedRect min_area_rect(std::span<const Vec2> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyPointSet, "min_area_rect needs >= 1 point");

  const std::vector<Vec2> hull = convex_hull(points);
  if (hull.size() == 1) return OrientedRect{hull[0], 0.0, 0.0, 0.0};
  if (hull.size() == 2) {
    const Vec2 d = hull[1] - hull[0];
    const double len = norm(d);
    const Vec2 dir = (1.0 / len) * d;
    const double a = dot(hull[0], dir);
    const double n = cross(dir, hull[0]);
    return make_rect(dir, a, a + len, n, n);
  }

  // Rotating calipers: for each hull edge the support points for max-along,
  // max-normal and min-along only move forward around the hull.
  const std::size_t n = hull.size();
  auto at = [&](std::size_t i) { return hull[i % n]; };
  std::size_t far_u = 1, far_n = 1, near_u = 1;
  double best_area = std::numeric_limits<double>::infinity();
  OrientedRect best;

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = at(i + 1) - at(i);
    const Vec2 dir = (1.0 / norm(e)) * e;
    const Vec2 nrm{-dir.y, dir.x};

    far_u = std::max(far_u, i + 1);
    for (std::size_t guard = 0; guard < n && dot(at(far_u + 1) - at(far_u), dir) > 0.0; ++guard)
      ++far_u;
    far_n = std::max(far_n, far_u);
    for (std::size_t guard = 0; guard < n && dot(at(far_n + 1) - at(far_n), nrm) > 0.0; ++guard)
      ++far_n;
    near_u = std::max(near_u, far_n);
    for (std::size_t guard = 0; guard < n && dot(at(near_u + 1) - at(near_u), dir) < 0.0;
         ++guard)
      ++near_u;

    const double base_n = dot(at(i), nrm);
    const double lo_u = dot(at(near_u), dir);
    const double hi_u = dot(at(far_u), dir);
    const double hi_n = dot(at(far_n), nrm);
    const double area = (hi_u - lo_u) * (hi_n - base_n);
    if (area < best_area) {
      best_area = area;
      best = make_rect(dir, lo_u, hi_u, base_n, hi_n);
    }
  }
  return best;
}

std::optional<OrientedRect> locate_marker(const BinaryMask& mask, std::size_t min_area) {
  const std::vector<Component> comps = connected_components(mask);
  if (comps.empty() || comps.front().area < min_area || comps.front().area == 0) {
    return std::nullopt;
  }
  // Interior pixels never lie on the hull; keep pixels with a 4-neighbour off.
  const Component& blob = comps.front();
  std::vector<Vec2> boundary;
  for (const PixelCoord& p : blob.pixels) {
    const bool edge = !mask.contains(p.x - 1, p.y) || !mask.on(p.x - 1, p.y) ||
                      !mask.contains(p.x + 1, p.y) || !mask.on(p.x + 1, p.y) ||
                      !mask.contains(p.x, p.y - 1) || !mask.on(p.x, p.y - 1) ||
                      !mask.contains(p.x, p.y + 1) || !mask.on(p.x, p.y + 1);
    if (edge) boundary.push_back(pixel_center(p));
  }
  return min_area_rect(boundary);
}

}  // namespace vip

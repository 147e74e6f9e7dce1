#include "vip/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vip/error.hpp"

namespace vip::synth {
namespace {

bool inside_convex(const std::array<Vec2, 4>& c, Vec2 p) {
  // Either winding: all edge crosses share a sign.
  bool pos = false, neg = false;
  for (int i = 0; i < 4; ++i) {
    const double s = cross(c[(i + 1) % 4] - c[i], p - c[i]);
    pos |= s > 0;
    neg |= s < 0;
  }
  return !(pos && neg);
}

void fill_rect(Frame& f, const FrameRect& r, Rgb color) {
  const int x0 = std::max(0, static_cast<int>(std::ceil(r.x - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(r.y - 0.5)));
  const int x1 = std::min(f.width(), static_cast<int>(std::ceil(r.x + r.w - 0.5)));
  const int y1 = std::min(f.height(), static_cast<int>(std::ceil(r.y + r.h - 0.5)));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) f.at(x, y) = color;
  }
}

double quantize(double s) {
  const double c = std::clamp(s, -1.0, 1.0);
  return static_cast<double>(std::clamp(std::lround(c * 32768.0), -32768L, 32767L)) / 32768.0;
}

}  // namespace

Frame render_scene(const SceneSpec& spec, std::span<const MarkerPlacement> markers,
                   std::int64_t timestamp_ms) {
  if (spec.width <= 0 || spec.height <= 0) throw Error(ErrorCode::BadParam, "scene size");
  Frame f(spec.width, spec.height, spec.background, timestamp_ms);
  if (spec.palette_rect) fill_rect(f, *spec.palette_rect, spec.palette);

  const auto& q = spec.quad.corners;
  double x_lo = q[0].x, x_hi = q[0].x, y_lo = q[0].y, y_hi = q[0].y;
  for (const Vec2& c : q) {
    x_lo = std::min(x_lo, c.x), x_hi = std::max(x_hi, c.x);
    y_lo = std::min(y_lo, c.y), y_hi = std::max(y_hi, c.y);
  }
  const int qx0 = std::max(0, static_cast<int>(std::floor(x_lo)));
  const int qx1 = std::min(spec.width - 1, static_cast<int>(std::ceil(x_hi)));
  const int qy0 = std::max(0, static_cast<int>(std::floor(y_lo)));
  const int qy1 = std::min(spec.height - 1, static_cast<int>(std::ceil(y_hi)));
  for (int y = qy0; y <= qy1; ++y) {
    for (int x = qx0; x <= qx1; ++x) {
      if (inside_convex(q, {x + 0.5, y + 0.5})) f.at(x, y) = spec.object;
    }
  }

  const double r = spec.marker_radius;
  for (const MarkerPlacement& m : markers) {
    const auto it = std::find_if(spec.markers.begin(), spec.markers.end(),
                                 [&](const SceneMarker& s) { return s.id == m.id; });
    if (it == spec.markers.end()) throw Error(ErrorCode::BadParam, "unknown marker '" + m.id + "'");
    if (!m.position) continue;
    const Vec2 c = *m.position;
    const int x0 = std::max(0, static_cast<int>(std::floor(c.x - r)));
    const int x1 = std::min(spec.width - 1, static_cast<int>(std::ceil(c.x + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(c.y - r)));
    const int y1 = std::min(spec.height - 1, static_cast<int>(std::ceil(c.y + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - c.x, dy = y + 0.5 - c.y;
        if (dx * dx + dy * dy <= r * r) f.at(x, y) = it->color;
      }
    }
  }
  return f;
}

AudioChunk render_taps(std::span<const double> tap_times_ms, std::int64_t first_sample,
                       std::size_t count, double sample_rate, const ToneBurst& burst) {
  if (!(sample_rate > 0)) throw Error(ErrorCode::BadParam, "sample rate must be positive");
  AudioChunk out;
  out.sample_rate = sample_rate;
  out.start_time_ms = 1000.0 * static_cast<double>(first_sample) / sample_rate;
  out.samples.assign(count, 0.0);
  const auto length = static_cast<std::int64_t>(std::llround(burst.duration_ms * sample_rate / 1000.0));
  const auto end = first_sample + static_cast<std::int64_t>(count);
  for (double t : tap_times_ms) {
    const std::int64_t s0 = sample_at(t, sample_rate);
    const std::int64_t lo = std::max(s0, first_sample);
    const std::int64_t hi = std::min(s0 + length, end);
    for (std::int64_t s = lo; s < hi; ++s) {
      // Phase indexed from the burst's own first sample.
      const double phase = 2.0 * std::numbers::pi * burst.frequency_hz *
                           static_cast<double>(s - s0) / sample_rate;
      out.samples[static_cast<std::size_t>(s - first_sample)] += burst.amplitude * std::sin(phase);
    }
  }
  for (double& s : out.samples) s = quantize(s);
  return out;
}

}  // namespace vip::synth

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vip/audio.hpp"
#include "vip/edges.hpp"
#include "vip/gesture.hpp"
#include "vip/raster.hpp"

// Stand-ins for the camera and microphone: a flat scene with the display
// object, the printed palette and disc markers, and a tap track made of short
// tone bursts. The wire path and file fixtures both go through here, so the
// two produce the same bytes.
namespace vip::synth {

struct SceneMarker {
  std::string id;
  Rgb color;
};

struct SceneSpec {
  int width = 320;
  int height = 240;
  Rgb background{60, 60, 60};
  Rgb object{200, 200, 200};
  Rgb palette{72, 72, 84};  // low contrast: weak edges only
  DisplayQuad quad{{Vec2{60, 20}, Vec2{300, 20}, Vec2{300, 200}, Vec2{60, 200}}, 1.0};
  std::optional<FrameRect> palette_rect = FrameRect{4, 4, 40, 160};
  double marker_radius = 6.0;
  std::vector<SceneMarker> markers{{"index", {220, 30, 30}}, {"thumb", {30, 200, 60}}};
};

struct MarkerPlacement {
  std::string id;
  std::optional<Vec2> position;  // frame px; absent = occluded
};

// Pixels whose centre lies inside the (convex) quad take the object colour;
// markers are discs painted last, in placement order. Throws BadParam for an
// id missing from the scene or a non-positive size.
Frame render_scene(const SceneSpec& spec, std::span<const MarkerPlacement> markers,
                   std::int64_t timestamp_ms = 0);

struct ToneBurst {
  double frequency_hz = 1788.85;  // sqrt(800 * 4000), the default click band
  double amplitude = 0.9;
  double duration_ms = 5.0;
};

inline std::int64_t sample_at(double time_ms, double sample_rate) {
  return std::llround(time_ms * sample_rate / 1000.0);
}

// Samples [first_sample, first_sample + count) of a track that is silent
// except for one burst starting at each tap time. Values are rounded to
// 16-bit steps so a WAV round trip is exact.
AudioChunk render_taps(std::span<const double> tap_times_ms, std::int64_t first_sample,
                       std::size_t count, double sample_rate, const ToneBurst& burst = {});

}  // namespace vip::synth

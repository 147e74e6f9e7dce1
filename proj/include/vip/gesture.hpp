#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "vip/edges.hpp"
#include "vip/gesture_event.hpp"
#include "vip/panel.hpp"
#include "vip/tracker.hpp"

namespace vip {

// Inverse of the bilinear patch spanned by TL, TR, BR, BL: frame point to
// (u, v) with TL = (0,0) and BR = (1,1). Outside points map outside [0,1]²
// unclamped. Throws DegenerateQuad for a non-simple or near-zero-area quad.
Vec2 to_panel_coords(Vec2 frame_pos, const DisplayQuad& quad);
Vec2 from_panel_coords(Vec2 uv, const DisplayQuad& quad);

// Axis-aligned region in frame coordinates.
struct FrameRect {
  double x = 0, y = 0, w = 0, h = 0;
  bool contains(Vec2 p) const noexcept { return p.x >= x && p.x < x + w && p.y >= y && p.y < y + h; }
};

struct GestureConfig {
  std::string primary = "index";
  std::string secondary = "thumb";
  // Physical palette: stacked horizontal slots, one per template in doc order.
  FrameRect palette{4, 4, 40, 160};
  double pinch_inflate = 0.10;
  double wipe_corner = 0.15;
  double wipe_rise = 0.40;
  std::size_t wipe_frames = 15;
  double scan_epsilon_px = 0.5;
};

// Palette slot under a frame point, as an index into doc.palette.
std::optional<std::size_t> palette_slot(const GestureConfig& cfg, const PrototypeDoc& doc, Vec2 p);
Vec2 palette_slot_center(const GestureConfig& cfg, const PrototypeDoc& doc, std::size_t index);

struct GestureState {
  Mode mode = Mode::Edit;
  std::optional<std::string> clipboard;  // palette template id
  std::optional<std::string> selection;  // last placed or dropped element, for Lock
  struct Drag {
    std::string element;
    Vec2 offset;  // marker minus element origin, panel units
  };
  std::optional<Drag> drag;
  struct Pinch {
    double start_distance = 0;  // frame px
    double last_distance = 0;
    std::string element;
  };
  std::optional<Pinch> pinch;
  bool pinch_armed = true;  // re-armed once the markers leave every element
  std::deque<std::optional<Vec2>> wipe_trace;  // primary marker, panel coords
  std::optional<Vec2> last_primary;            // frame px, for motion
};

struct GestureInput {
  std::vector<MarkerState> markers;
  std::optional<TapEvent> tap;
  std::optional<DisplayQuad> quad;
};

struct GestureStep {
  GestureState state;
  std::vector<GestureEvent> events;
  std::vector<std::string> diagnostics;  // dropped inputs
};

// Pure transition. Per tick: the tap (palette first, then panel), then drag
// motion, pinch, Scan and wipe detection, in that order.
GestureStep step(const GestureState& state, const GestureInput& input, const PrototypeDoc& doc,
                 const GestureConfig& config);

}  // namespace vip

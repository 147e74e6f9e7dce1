#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vip/audio.hpp"
#include "vip/geometry.hpp"
#include "vip/raster.hpp"

namespace vip {

struct MarkerConfig {
  std::string id;
  HsvRange range;
  std::size_t min_area = 25;
};

struct MarkerState {
  std::string id;
  std::optional<Vec2> position;  // smoothed; absent when no blob qualifies
  Vec2 velocity;                 // px per frame, zero while absent
  std::int64_t last_seen = -1;   // frame index, -1 before first sighting

  friend bool operator==(const MarkerState&, const MarkerState&) = default;
};

inline constexpr double kMarkerSmoothing = 0.5;

// One state per config, in config order. A fresh sighting (no previous
// position) is reported raw with zero velocity; otherwise
// p = alpha * raw + (1 - alpha) * p_prev and velocity = p - p_prev.
// Throws BadParam for an empty config list or duplicate ids.
std::vector<MarkerState> track_markers(const Frame& frame, std::span<const MarkerConfig> configs,
                                       std::span<const MarkerState> prev,
                                       std::int64_t frame_index,
                                       double alpha = kMarkerSmoothing);

const MarkerState* find_marker(std::span<const MarkerState> states, std::string_view id);

struct TrackedFrame {
  double timestamp_ms = 0.0;
  std::vector<MarkerState> markers;
};

struct TapEvent {
  double time_ms = 0.0;
  Vec2 position;
  std::string marker_id;

  friend bool operator==(const TapEvent&, const TapEvent&) = default;
};

// Picks the tracked frame nearest to the click (earlier frame on a tie). It
// must lie within max_skew_ms of the click and show the primary marker.
std::optional<TapEvent> fuse_click(std::span<const TrackedFrame> history, const ClickEvent& click,
                                   std::string_view primary_marker, double max_skew_ms);

}  // namespace vip

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vip/geometry.hpp"

namespace vip {

enum class GestureKind {
  Scan,
  Select,
  Place,
  DragMove,
  DragEnd,
  Lock,
  Click,
  ResizeStart,
  ResizeMove,
  ResizeEnd,
  WipeOpen,
  WipeClose,
};

std::string_view to_string(GestureKind kind);
std::optional<GestureKind> gesture_kind_from_string(std::string_view name);

inline constexpr std::string_view kSurfacePanel = "panel";
inline constexpr std::string_view kSurfacePalette = "palette";

// target names an element, a palette template (Select) or a surface (Scan,
// wipes). Positions are panel coordinates.
//   Place:          target = new element id, template_id, position = origin
//   DragMove/End:   position = marker, offset = marker minus element origin
//   Resize*:        scale on ResizeMove (current / start distance)
struct GestureEvent {
  GestureKind kind = GestureKind::Scan;
  std::string target;
  std::optional<Vec2> position;
  std::optional<double> scale;
  std::optional<std::string> template_id;
  std::optional<Vec2> offset;

  friend bool operator==(const GestureEvent&, const GestureEvent&) = default;
};

nlohmann::ordered_json to_json(const GestureEvent& ev);
// Throws BadParam on a malformed event.
GestureEvent gesture_event_from_json(const nlohmann::json& j);

}  // namespace vip

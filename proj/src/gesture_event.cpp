#include "vip/gesture_event.hpp"

#include <array>

#include "vip/error.hpp"

namespace vip {
namespace {

constexpr std::array<std::pair<GestureKind, std::string_view>, 12> kNames{{
    {GestureKind::Scan, "Scan"},
    {GestureKind::Select, "Select"},
    {GestureKind::Place, "Place"},
    {GestureKind::DragMove, "DragMove"},
    {GestureKind::DragEnd, "DragEnd"},
    {GestureKind::Lock, "Lock"},
    {GestureKind::Click, "Click"},
    {GestureKind::ResizeStart, "ResizeStart"},
    {GestureKind::ResizeMove, "ResizeMove"},
    {GestureKind::ResizeEnd, "ResizeEnd"},
    {GestureKind::WipeOpen, "WipeOpen"},
    {GestureKind::WipeClose, "WipeClose"},
}};

nlohmann::ordered_json vec_json(Vec2 p) { return {{"u", p.x}, {"v", p.y}}; }

Vec2 vec_from(const nlohmann::json& j, std::string_view field) {
  if (!j.is_object() || !j.contains("u") || !j.contains("v") || !j["u"].is_number() ||
      !j["v"].is_number()) {
    throw Error(ErrorCode::BadParam, std::string(field) + " must be {\"u\": number, \"v\": number}");
  }
  return {j["u"].get<double>(), j["v"].get<double>()};
}

}  // namespace

std::string_view to_string(GestureKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

std::optional<GestureKind> gesture_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

nlohmann::ordered_json to_json(const GestureEvent& ev) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(ev.kind));
  j["target"] = ev.target;
  if (ev.position) j["position"] = vec_json(*ev.position);
  if (ev.scale) j["scale"] = *ev.scale;
  if (ev.template_id) j["template"] = *ev.template_id;
  if (ev.offset) j["offset"] = vec_json(*ev.offset);
  return j;
}

GestureEvent gesture_event_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::BadParam, "gesture event must be an object");
  GestureEvent ev;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::BadParam, "gesture event needs a string kind");
  }
  const auto kind = gesture_kind_from_string(j["kind"].get<std::string>());
  if (!kind) throw Error(ErrorCode::BadParam, "unknown gesture kind " + j["kind"].dump());
  ev.kind = *kind;
  if (!j.contains("target") || !j["target"].is_string()) {
    throw Error(ErrorCode::BadParam, "gesture event needs a string target");
  }
  ev.target = j["target"].get<std::string>();
  if (j.contains("position")) ev.position = vec_from(j["position"], "position");
  if (j.contains("offset")) ev.offset = vec_from(j["offset"], "offset");
  if (j.contains("scale")) {
    if (!j["scale"].is_number()) throw Error(ErrorCode::BadParam, "scale must be a number");
    ev.scale = j["scale"].get<double>();
  }
  if (j.contains("template")) {
    if (!j["template"].is_string()) throw Error(ErrorCode::BadParam, "template must be a string");
    ev.template_id = j["template"].get<std::string>();
  }
  return ev;
}

}  // namespace vip

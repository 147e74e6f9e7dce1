#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vip/error.hpp"
#include "vip/gesture_event.hpp"
#include "vip/geometry.hpp"

namespace vip {

enum class ElementKind { Button, Screen, Slider, Label, LockControl };
enum class Mode { Edit, Run };

std::string_view to_string(ElementKind kind);
std::string_view to_string(Mode mode);
std::optional<ElementKind> element_kind_from_string(std::string_view name);
std::optional<Mode> mode_from_string(std::string_view name);

inline constexpr double kMinElementSize = 0.02;

// Panel fractions; origin is the top-left corner.
struct Bounds {
  double u = 0.0;
  double v = 0.0;
  double w = 0.1;
  double h = 0.1;

  Vec2 origin() const noexcept { return {u, v}; }
  Vec2 center() const noexcept { return {u + w / 2, v + h / 2}; }
  bool contains(Vec2 p) const noexcept { return p.x >= u && p.x <= u + w && p.y >= v && p.y <= v + h; }
  Bounds inflated(double fraction) const noexcept;
  bool within_panel() const noexcept;

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

// Sizes clamped to [kMinElementSize, 1], then the origin shifted inside [0,1]².
Bounds clamp_to_panel(Bounds b);

struct PanelElement {
  std::string id;
  ElementKind kind = ElementKind::Button;
  Bounds bounds;
  bool locked = false;
  int z = 0;
  std::string text;                 // Button caption, Label text
  double value = 0.0;               // Slider, [0,1]
  std::vector<std::string> frames;  // Screen: PPM paths relative to the doc
  int frame_index = 0;              // Screen

  friend bool operator==(const PanelElement&, const PanelElement&) = default;
};

struct Endpoint {
  std::string element;
  std::string port;

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct Connection {
  Endpoint from;  // outlet
  Endpoint to;    // inlet

  friend bool operator==(const Connection&, const Connection&) = default;
};

// Default wiring created with each placed instance; skipped when the target
// element is missing at placement time.
struct TemplateLink {
  std::string outlet;
  Endpoint to;

  friend bool operator==(const TemplateLink&, const TemplateLink&) = default;
};

struct PaletteTemplate {
  std::string id;
  ElementKind kind = ElementKind::Button;
  double w = 0.15;
  double h = 0.1;
  std::string text;
  double value = 0.0;
  std::vector<std::string> frames;
  std::vector<TemplateLink> links;

  friend bool operator==(const PaletteTemplate&, const PaletteTemplate&) = default;
};

struct PrototypeDoc {
  Mode mode = Mode::Edit;
  bool inspector = false;  // graph overlay toggled by wipes
  std::vector<PaletteTemplate> palette;
  std::vector<PanelElement> elements;
  std::vector<Connection> connections;

  // Size at ResizeStart, so cumulative scales apply to a fixed base. Not
  // persisted and ignored by ==.
  struct ResizeBase {
    std::string element;
    Bounds bounds;
  };
  std::optional<ResizeBase> resize_base;

  const PanelElement* find(std::string_view id) const;
  PanelElement* find(std::string_view id);
  const PaletteTemplate* find_template(std::string_view id) const;
  const PaletteTemplate* lock_control() const;

  friend bool operator==(const PrototypeDoc& a, const PrototypeDoc& b) {
    return a.mode == b.mode && a.inspector == b.inspector && a.palette == b.palette &&
           a.elements == b.elements && a.connections == b.connections;
  }
};

// BadDocument carrying the JSON pointer of the offending value.
class DocumentError : public Error {
 public:
  DocumentError(std::string pointer, const std::string& message);
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

enum class PortType { Pulse, Number };

struct PortSpec {
  std::string_view name;
  PortType type;
};

std::span<const PortSpec> outlets(ElementKind kind);
std::span<const PortSpec> inlets(ElementKind kind);

// `base` itself if unused, otherwise base-2, base-3, ...
std::string unique_element_id(const PrototypeDoc& doc, std::string_view base);

// Element ids in dataflow order: Kahn's algorithm, ties in document order.
// Throws CyclicGraph.
std::vector<std::string> topological_order(const PrototypeDoc& doc);

// Full structural check; throws DocumentError or CyclicGraph.
void validate(const PrototypeDoc& doc);

// Topmost (highest z, later in document order on ties) element containing p.
const PanelElement* hit_test(const PrototypeDoc& doc, Vec2 p);

struct Effect {
  enum class Kind { Trigger };
  Kind kind = Kind::Trigger;
  std::string element;

  friend bool operator==(const Effect&, const Effect&) = default;
};

struct ApplyResult {
  PrototypeDoc doc;
  std::vector<Effect> effects;
};

// Throws UnknownElement when the event names a missing element or template.
ApplyResult apply_gesture(const PrototypeDoc& doc, const GestureEvent& ev);

// One tick of event-driven propagation in topological order. Outlets fire only
// when triggered or fed: Button.pressed and Slider.value on a Trigger;
// Screen.frame whenever an inlet (or a Trigger) moved it. Screen.jump beats
// Screen.advance within a tick.
PrototypeDoc evaluate_graph(const PrototypeDoc& doc, std::span<const Effect> effects);

// Compact number rendering used for Label text: integers without a fraction,
// otherwise up to 6 significant digits.
std::string format_number(double v);

nlohmann::ordered_json doc_to_json(const PrototypeDoc& doc);
PrototypeDoc doc_from_json(const nlohmann::json& j);
// Canonical bytes: two-space indent, fixed key order, trailing newline.
std::string save_doc(const PrototypeDoc& doc);
PrototypeDoc load_doc(std::string_view bytes);

// Structured edits from the wire. Shapes:
//   {"op":"place","template":id,"position":{"u","v"}}
//   {"op":"move","element":id,"position":{"u","v"}}
//   {"op":"resize","element":id,"w":..,"h":..}
//   {"op":"lock","element":id,"locked":bool}
//   {"op":"connect"|"disconnect","from":{"element","port"},"to":{...}}
//   {"op":"remove","element":id}
//   {"op":"set_mode","mode":"edit"|"run"}
//   {"op":"replace","doc":{...}}
// Layout edits (place, move, resize, remove) need edit mode. Throws
// BadParam, UnknownElement, DocumentError or CyclicGraph; the input doc is
// never modified.
PrototypeDoc apply_edit(const PrototypeDoc& doc, const nlohmann::json& edit);

}  // namespace vip

#include "vip/panel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "vip/log.hpp"

namespace vip {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<ElementKind, std::string_view>, 5> kKindNames{{
    {ElementKind::Button, "Button"},
    {ElementKind::Screen, "Screen"},
    {ElementKind::Slider, "Slider"},
    {ElementKind::Label, "Label"},
    {ElementKind::LockControl, "LockControl"},
}};

constexpr PortSpec kButtonOut[] = {{"pressed", PortType::Pulse}};
constexpr PortSpec kSliderOut[] = {{"value", PortType::Number}};
constexpr PortSpec kScreenOut[] = {{"frame", PortType::Number}};
constexpr PortSpec kScreenIn[] = {{"advance", PortType::Pulse}, {"jump", PortType::Number}};
constexpr PortSpec kLabelIn[] = {{"text", PortType::Number}};

const PortSpec* find_port(std::span<const PortSpec> ports, std::string_view name) {
  for (const PortSpec& p : ports) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

constexpr double kEdgeSlack = 1e-9;

}  // namespace

std::string_view to_string(ElementKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

std::string_view to_string(Mode mode) { return mode == Mode::Edit ? "edit" : "run"; }

std::optional<ElementKind> element_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::optional<Mode> mode_from_string(std::string_view name) {
  if (name == "edit") return Mode::Edit;
  if (name == "run") return Mode::Run;
  return std::nullopt;
}

Bounds Bounds::inflated(double fraction) const noexcept {
  const double dw = w * fraction / 2, dh = h * fraction / 2;
  return {u - dw, v - dh, w + 2 * dw, h + 2 * dh};
}

bool Bounds::within_panel() const noexcept {
  const bool finite = std::isfinite(u) && std::isfinite(v) && std::isfinite(w) && std::isfinite(h);
  return finite && u >= -kEdgeSlack && v >= -kEdgeSlack && w >= kMinElementSize - kEdgeSlack &&
         h >= kMinElementSize - kEdgeSlack && u + w <= 1.0 + kEdgeSlack &&
         v + h <= 1.0 + kEdgeSlack;
}

Bounds clamp_to_panel(Bounds b) {
  b.w = std::clamp(std::isfinite(b.w) ? b.w : kMinElementSize, kMinElementSize, 1.0);
  b.h = std::clamp(std::isfinite(b.h) ? b.h : kMinElementSize, kMinElementSize, 1.0);
  b.u = std::clamp(std::isfinite(b.u) ? b.u : 0.0, 0.0, 1.0 - b.w);
  b.v = std::clamp(std::isfinite(b.v) ? b.v : 0.0, 0.0, 1.0 - b.h);
  return b;
}

const PanelElement* PrototypeDoc::find(std::string_view id) const {
  for (const PanelElement& e : elements) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

PanelElement* PrototypeDoc::find(std::string_view id) {
  for (PanelElement& e : elements) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const PaletteTemplate* PrototypeDoc::find_template(std::string_view id) const {
  for (const PaletteTemplate& t : palette) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const PaletteTemplate* PrototypeDoc::lock_control() const {
  for (const PaletteTemplate& t : palette) {
    if (t.kind == ElementKind::LockControl) return &t;
  }
  return nullptr;
}

DocumentError::DocumentError(std::string pointer, const std::string& message)
    : Error(ErrorCode::BadDocument, (pointer.empty() ? std::string("/") : pointer) + ": " + message),
      pointer_(std::move(pointer)) {}

std::span<const PortSpec> outlets(ElementKind kind) {
  switch (kind) {
    case ElementKind::Button: return kButtonOut;
    case ElementKind::Slider: return kSliderOut;
    case ElementKind::Screen: return kScreenOut;
    default: return {};
  }
}

std::span<const PortSpec> inlets(ElementKind kind) {
  switch (kind) {
    case ElementKind::Screen: return kScreenIn;
    case ElementKind::Label: return kLabelIn;
    default: return {};
  }
}

std::string unique_element_id(const PrototypeDoc& doc, std::string_view base) {
  if (!doc.find(base)) return std::string(base);
  for (int n = 2;; ++n) {
    std::string candidate = std::string(base) + "-" + std::to_string(n);
    if (!doc.find(candidate)) return candidate;
  }
}

std::vector<std::string> topological_order(const PrototypeDoc& doc) {
  const std::size_t n = doc.elements.size();
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(doc.elements[i].id, i);
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const Connection& c : doc.connections) {
    const auto a = index.find(c.from.element), b = index.find(c.to.element);
    if (a == index.end() || b == index.end()) {
      throw Error(ErrorCode::UnknownElement, "connection endpoint " + c.from.element + " -> " +
                                                 c.to.element + " names a missing element");
    }
    out[a->second].push_back(b->second);
    ++indegree[b->second];
  }
  // Always take the ready element that comes first in the document.
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  std::vector<std::string> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(doc.elements[i].id);
    for (std::size_t j : out[i]) {
      if (--indegree[j] == 0) ready.insert(j);
    }
  }
  if (order.size() != n) {
    std::string members;
    for (std::size_t i = 0; i < n; ++i) {
      if (indegree[i] > 0) members += (members.empty() ? "" : ", ") + doc.elements[i].id;
    }
    throw Error(ErrorCode::CyclicGraph, "connection cycle through " + members);
  }
  return order;
}

namespace {

void validate_kind_state(ElementKind kind, double value, const std::vector<std::string>& frames,
                         const std::string& ptr) {
  if (kind == ElementKind::Slider && !(value >= 0.0 && value <= 1.0)) {
    throw DocumentError(ptr + "/value", "slider value must lie in [0,1]");
  }
  if (kind == ElementKind::Screen) {
    if (frames.empty()) throw DocumentError(ptr + "/frames", "screen needs at least one frame");
    for (std::size_t k = 0; k < frames.size(); ++k) {
      if (frames[k].empty()) {
        throw DocumentError(ptr + "/frames/" + std::to_string(k), "empty frame path");
      }
    }
  }
}

}  // namespace

void validate(const PrototypeDoc& doc) {
  std::set<std::string_view> template_ids;
  std::size_t lock_controls = 0;
  for (std::size_t i = 0; i < doc.palette.size(); ++i) {
    const PaletteTemplate& t = doc.palette[i];
    const std::string ptr = "/palette/" + std::to_string(i);
    if (t.id.empty()) throw DocumentError(ptr + "/id", "empty template id");
    if (!template_ids.insert(t.id).second) {
      throw DocumentError(ptr + "/id", "duplicate template id '" + t.id + "'");
    }
    if (!(t.w >= kMinElementSize && t.w <= 1.0 && t.h >= kMinElementSize && t.h <= 1.0)) {
      throw DocumentError(ptr + "/size", "template size must lie in [0.02, 1]");
    }
    validate_kind_state(t.kind, t.value, t.frames, ptr);
    lock_controls += t.kind == ElementKind::LockControl;
    for (std::size_t k = 0; k < t.links.size(); ++k) {
      if (!find_port(outlets(t.kind), t.links[k].outlet)) {
        throw DocumentError(ptr + "/links/" + std::to_string(k) + "/outlet",
                            "no outlet '" + t.links[k].outlet + "' on " +
                                std::string(to_string(t.kind)));
      }
    }
  }
  if (lock_controls != 1) {
    throw DocumentError("/palette", "palette needs exactly one LockControl, found " +
                                        std::to_string(lock_controls));
  }

  std::set<std::string_view> ids;
  for (std::size_t i = 0; i < doc.elements.size(); ++i) {
    const PanelElement& e = doc.elements[i];
    const std::string ptr = "/elements/" + std::to_string(i);
    if (e.id.empty()) throw DocumentError(ptr + "/id", "empty element id");
    if (!ids.insert(e.id).second) throw DocumentError(ptr + "/id", "duplicate id '" + e.id + "'");
    if (e.kind == ElementKind::LockControl) {
      throw DocumentError(ptr + "/kind", "LockControl lives in the palette only");
    }
    if (!e.bounds.within_panel()) throw DocumentError(ptr + "/bounds", "bounds leave the panel");
    validate_kind_state(e.kind, e.value, e.frames, ptr);
    if (e.kind == ElementKind::Screen &&
        (e.frame_index < 0 || e.frame_index >= static_cast<int>(e.frames.size()))) {
      throw DocumentError(ptr + "/frame_index", "frame_index out of range");
    }
  }

  for (std::size_t i = 0; i < doc.connections.size(); ++i) {
    const Connection& c = doc.connections[i];
    const std::string ptr = "/connections/" + std::to_string(i);
    const PanelElement* from = doc.find(c.from.element);
    if (!from) throw DocumentError(ptr + "/from", "unknown element '" + c.from.element + "'");
    const PortSpec* out = find_port(outlets(from->kind), c.from.port);
    if (!out) throw DocumentError(ptr + "/from/port", "no outlet '" + c.from.port + "'");
    const PanelElement* to = doc.find(c.to.element);
    if (!to) throw DocumentError(ptr + "/to", "unknown element '" + c.to.element + "'");
    const PortSpec* in = find_port(inlets(to->kind), c.to.port);
    if (!in) throw DocumentError(ptr + "/to/port", "no inlet '" + c.to.port + "'");
    if (in->type != out->type) throw DocumentError(ptr, "outlet and inlet types differ");
    for (std::size_t k = 0; k < i; ++k) {
      if (doc.connections[k] == c) throw DocumentError(ptr, "duplicate connection");
    }
  }
  topological_order(doc);
}

const PanelElement* hit_test(const PrototypeDoc& doc, Vec2 p) {
  const PanelElement* best = nullptr;
  for (const PanelElement& e : doc.elements) {
    if (e.bounds.contains(p) && (!best || e.z >= best->z)) best = &e;
  }
  return best;
}

namespace {

PanelElement& require(PrototypeDoc& doc, std::string_view id) {
  PanelElement* e = doc.find(id);
  if (!e) throw Error(ErrorCode::UnknownElement, "no element '" + std::string(id) + "'");
  return *e;
}

bool connection_fits(const PrototypeDoc& doc, const Connection& c) {
  const PanelElement* from = doc.find(c.from.element);
  const PanelElement* to = doc.find(c.to.element);
  if (!from || !to) return false;
  const PortSpec* out = find_port(outlets(from->kind), c.from.port);
  const PortSpec* in = find_port(inlets(to->kind), c.to.port);
  if (!out || !in || out->type != in->type) return false;
  return std::find(doc.connections.begin(), doc.connections.end(), c) == doc.connections.end();
}

bool acyclic(const PrototypeDoc& doc) {
  try {
    topological_order(doc);
    return true;
  } catch (const Error&) {
    return false;
  }
}

int next_z(const PrototypeDoc& doc) {
  int z = 0;
  for (const PanelElement& e : doc.elements) z = std::max(z, e.z + 1);
  return z;
}

void place(PrototypeDoc& doc, const PaletteTemplate& t, const std::string& id, Vec2 origin) {
  if (t.kind == ElementKind::LockControl) {
    throw Error(ErrorCode::BadParam, "the Lock control cannot be placed");
  }
  if (doc.find(id)) throw Error(ErrorCode::BadParam, "element id '" + id + "' already in use");
  PanelElement e;
  e.id = id;
  e.kind = t.kind;
  e.bounds = clamp_to_panel({origin.x, origin.y, t.w, t.h});
  e.z = next_z(doc);
  e.text = t.text;
  e.value = t.value;
  e.frames = t.frames;
  doc.elements.push_back(std::move(e));
  for (const TemplateLink& link : t.links) {
    const Connection c{{id, link.outlet}, link.to};
    if (!connection_fits(doc, c)) {
      log::warn("skipping link " + id + "." + link.outlet + " -> " + link.to.element + "." +
                link.to.port + ": target missing or incompatible");
      continue;
    }
    doc.connections.push_back(c);
    if (!acyclic(doc)) {
      doc.connections.pop_back();
      log::warn("skipping link from " + id + ": it would close a cycle");
    }
  }
}

Bounds scaled_about_center(const Bounds& base, double scale) {
  const Vec2 c = base.center();
  const double w = std::clamp(base.w * scale, kMinElementSize, 1.0);
  const double h = std::clamp(base.h * scale, kMinElementSize, 1.0);
  return clamp_to_panel({c.x - w / 2, c.y - h / 2, w, h});
}

}  // namespace

ApplyResult apply_gesture(const PrototypeDoc& doc, const GestureEvent& ev) {
  ApplyResult r{doc, {}};
  PrototypeDoc& d = r.doc;
  switch (ev.kind) {
    case GestureKind::Scan:
      break;
    case GestureKind::Select:
      if (!d.find_template(ev.target)) {
        throw Error(ErrorCode::UnknownElement, "no palette template '" + ev.target + "'");
      }
      break;
    case GestureKind::Place: {
      const std::string tid = ev.template_id.value_or(ev.target);
      const PaletteTemplate* t = d.find_template(tid);
      if (!t) throw Error(ErrorCode::UnknownElement, "no palette template '" + tid + "'");
      const PaletteTemplate copy = *t;
      place(d, copy, ev.target, ev.position.value_or(Vec2{0, 0}));
      break;
    }
    case GestureKind::DragMove:
    case GestureKind::DragEnd: {
      PanelElement& e = require(d, ev.target);
      if (ev.position) {
        const Vec2 o = *ev.position - ev.offset.value_or(Vec2{0, 0});
        e.bounds = clamp_to_panel({o.x, o.y, e.bounds.w, e.bounds.h});
      }
      break;
    }
    case GestureKind::Lock:
      require(d, ev.target).locked = true;
      break;
    case GestureKind::Click: {
      PanelElement& e = require(d, ev.target);
      if (e.kind == ElementKind::Slider && ev.position) {
        e.value = std::clamp((ev.position->x - e.bounds.u) / e.bounds.w, 0.0, 1.0);
      }
      r.effects.push_back({Effect::Kind::Trigger, e.id});
      break;
    }
    case GestureKind::ResizeStart:
      d.resize_base = PrototypeDoc::ResizeBase{ev.target, require(d, ev.target).bounds};
      break;
    case GestureKind::ResizeMove: {
      PanelElement& e = require(d, ev.target);
      if (!d.resize_base || d.resize_base->element != e.id) {
        d.resize_base = PrototypeDoc::ResizeBase{e.id, e.bounds};
      }
      if (ev.scale && std::isfinite(*ev.scale) && *ev.scale > 0) {
        e.bounds = scaled_about_center(d.resize_base->bounds, *ev.scale);
      }
      break;
    }
    case GestureKind::ResizeEnd:
      require(d, ev.target);
      d.resize_base.reset();
      break;
    case GestureKind::WipeOpen:
      d.inspector = true;
      break;
    case GestureKind::WipeClose:
      d.inspector = false;
      break;
  }
  return r;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return v != v ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v == 0.0 ? 0.0 : v);
  } else {
    std::snprintf(buf, sizeof buf, "%.6g", v);
  }
  return buf;
}

PrototypeDoc evaluate_graph(const PrototypeDoc& doc, std::span<const Effect> effects) {
  PrototypeDoc out = doc;
  const std::vector<std::string> order = topological_order(out);

  // Inbound signals per element and inlet, in delivery order.
  std::map<std::string, std::map<std::string, std::vector<double>>, std::less<>> inbox;
  std::set<std::string, std::less<>> triggered;
  for (const Effect& fx : effects) {
    if (!out.find(fx.element)) {
      throw Error(ErrorCode::UnknownElement, "effect targets missing element '" + fx.element + "'");
    }
    triggered.insert(fx.element);
  }

  for (const std::string& id : order) {
    PanelElement& e = *out.find(id);
    const bool trig = triggered.contains(id);
    auto& in = inbox[id];
    std::vector<std::pair<std::string_view, double>> fired;
    switch (e.kind) {
      case ElementKind::Button:
        if (trig) fired.emplace_back("pressed", 1.0);
        break;
      case ElementKind::Slider:
        if (trig) fired.emplace_back("value", e.value);
        break;
      case ElementKind::Screen: {
        const int len = static_cast<int>(e.frames.size());
        const auto jump = in.find("jump");
        const auto adv = in.find("advance");
        const std::size_t pulses = (adv != in.end() ? adv->second.size() : 0) + (trig ? 1 : 0);
        bool moved = false;
        if (jump != in.end() && !jump->second.empty()) {
          const double f = std::clamp(jump->second.back(), 0.0, 1.0);
          e.frame_index = static_cast<int>(std::lround(f * (len - 1)));
          moved = true;
        } else if (pulses > 0) {
          e.frame_index = static_cast<int>((e.frame_index + pulses) % len);
          moved = true;
        }
        if (moved) fired.emplace_back("frame", e.frame_index);
        break;
      }
      case ElementKind::Label: {
        const auto text = in.find("text");
        if (text != in.end() && !text->second.empty()) e.text = format_number(text->second.back());
        break;
      }
      case ElementKind::LockControl:
        break;
    }
    for (const auto& [port, value] : fired) {
      for (const Connection& c : out.connections) {
        if (c.from.element == id && c.from.port == port) inbox[c.to.element][c.to.port].push_back(value);
      }
    }
  }
  return out;
}

// ---- JSON ----

namespace {

ordered_json endpoint_json(const Endpoint& p) { return {{"element", p.element}, {"port", p.port}}; }

void put_kind_state(ordered_json& j, ElementKind kind, const std::string& text, double value,
                    const std::vector<std::string>& frames) {
  switch (kind) {
    case ElementKind::Button:
    case ElementKind::Label:
      j["text"] = text;
      break;
    case ElementKind::Slider:
      j["value"] = value;
      break;
    case ElementKind::Screen:
      j["frames"] = frames;
      break;
    case ElementKind::LockControl:
      break;
  }
}

// Field access with JSON-pointer diagnostics.
class Reader {
 public:
  Reader(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) throw DocumentError(ptr_, "expected an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, _] : j_.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        throw DocumentError(ptr_ + "/" + k, "unknown field");
      }
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const char* key) const { return ptr_ + "/" + key; }

  const json& get(const char* key) const {
    if (!j_.contains(key)) throw DocumentError(at(key), "missing field");
    return j_[key];
  }

  std::string string(const char* key) const {
    const json& v = get(key);
    if (!v.is_string()) throw DocumentError(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::string string_or(const char* key, std::string fallback) const {
    return has(key) ? string(key) : fallback;
  }

  double number(const char* key) const {
    const json& v = get(key);
    if (!v.is_number()) throw DocumentError(at(key), "expected a number");
    return v.get<double>();
  }

  double number_or(const char* key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  int integer_or(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_number_integer()) throw DocumentError(at(key), "expected an integer");
    return v.get<int>();
  }

  bool boolean_or(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_boolean()) throw DocumentError(at(key), "expected a boolean");
    return v.get<bool>();
  }

  const json& array_or_empty(const char* key) const {
    static const json kEmpty = json::array();
    if (!has(key)) return kEmpty;
    const json& v = get(key);
    if (!v.is_array()) throw DocumentError(at(key), "expected an array");
    return v;
  }

  std::vector<std::string> strings(const char* key) const {
    std::vector<std::string> out;
    const json& arr = array_or_empty(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) {
        throw DocumentError(at(key) + "/" + std::to_string(i), "expected a string");
      }
      out.push_back(arr[i].get<std::string>());
    }
    return out;
  }

  ElementKind kind() const {
    const std::string name = string("kind");
    const auto k = element_kind_from_string(name);
    if (!k) throw DocumentError(at("kind"), "unknown kind '" + name + "'");
    return *k;
  }

 private:
  const json& j_;
  std::string ptr_;
};

Endpoint read_endpoint(const json& j, const std::string& ptr) {
  Reader r(j, ptr);
  r.allow_only({"element", "port"});
  return {r.string("element"), r.string("port")};
}

}  // namespace

ordered_json doc_to_json(const PrototypeDoc& doc) {
  ordered_json j;
  j["version"] = 1;
  j["mode"] = std::string(to_string(doc.mode));
  j["inspector"] = doc.inspector;
  j["palette"] = ordered_json::array();
  for (const PaletteTemplate& t : doc.palette) {
    ordered_json tj;
    tj["id"] = t.id;
    tj["kind"] = std::string(to_string(t.kind));
    tj["size"] = {{"w", t.w}, {"h", t.h}};
    put_kind_state(tj, t.kind, t.text, t.value, t.frames);
    if (!t.links.empty()) {
      tj["links"] = ordered_json::array();
      for (const TemplateLink& l : t.links) {
        tj["links"].push_back({{"outlet", l.outlet}, {"to", endpoint_json(l.to)}});
      }
    }
    j["palette"].push_back(std::move(tj));
  }
  j["elements"] = ordered_json::array();
  for (const PanelElement& e : doc.elements) {
    ordered_json ej;
    ej["id"] = e.id;
    ej["kind"] = std::string(to_string(e.kind));
    ej["bounds"] = {{"u", e.bounds.u}, {"v", e.bounds.v}, {"w", e.bounds.w}, {"h", e.bounds.h}};
    ej["locked"] = e.locked;
    ej["z"] = e.z;
    put_kind_state(ej, e.kind, e.text, e.value, e.frames);
    if (e.kind == ElementKind::Screen) ej["frame_index"] = e.frame_index;
    j["elements"].push_back(std::move(ej));
  }
  j["connections"] = ordered_json::array();
  for (const Connection& c : doc.connections) {
    j["connections"].push_back({{"from", endpoint_json(c.from)}, {"to", endpoint_json(c.to)}});
  }
  return j;
}

PrototypeDoc doc_from_json(const json& j) {
  Reader root(j, "");
  root.allow_only({"version", "mode", "inspector", "palette", "elements", "connections"});
  const json& version = root.get("version");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw DocumentError("/version", "unsupported version " + version.dump());
  }
  PrototypeDoc doc;
  const std::string mode = root.string_or("mode", "edit");
  const auto m = mode_from_string(mode);
  if (!m) throw DocumentError("/mode", "mode must be \"edit\" or \"run\"");
  doc.mode = *m;
  doc.inspector = root.boolean_or("inspector", false);

  const json& palette = root.array_or_empty("palette");
  for (std::size_t i = 0; i < palette.size(); ++i) {
    const std::string ptr = "/palette/" + std::to_string(i);
    Reader r(palette[i], ptr);
    r.allow_only({"id", "kind", "size", "text", "value", "frames", "links"});
    PaletteTemplate t;
    t.id = r.string("id");
    t.kind = r.kind();
    Reader size(r.get("size"), ptr + "/size");
    size.allow_only({"w", "h"});
    t.w = size.number("w");
    t.h = size.number("h");
    t.text = r.string_or("text", "");
    t.value = r.number_or("value", 0.0);
    t.frames = r.strings("frames");
    const json& links = r.array_or_empty("links");
    for (std::size_t k = 0; k < links.size(); ++k) {
      const std::string lp = ptr + "/links/" + std::to_string(k);
      Reader lr(links[k], lp);
      lr.allow_only({"outlet", "to"});
      t.links.push_back({lr.string("outlet"), read_endpoint(lr.get("to"), lp + "/to")});
    }
    doc.palette.push_back(std::move(t));
  }

  const json& elements = root.array_or_empty("elements");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string ptr = "/elements/" + std::to_string(i);
    Reader r(elements[i], ptr);
    r.allow_only({"id", "kind", "bounds", "locked", "z", "text", "value", "frames", "frame_index"});
    PanelElement e;
    e.id = r.string("id");
    e.kind = r.kind();
    Reader b(r.get("bounds"), ptr + "/bounds");
    b.allow_only({"u", "v", "w", "h"});
    e.bounds = {b.number("u"), b.number("v"), b.number("w"), b.number("h")};
    e.locked = r.boolean_or("locked", false);
    e.z = r.integer_or("z", 0);
    e.text = r.string_or("text", "");
    e.value = r.number_or("value", 0.0);
    e.frames = r.strings("frames");
    e.frame_index = r.integer_or("frame_index", 0);
    doc.elements.push_back(std::move(e));
  }

  const json& connections = root.array_or_empty("connections");
  for (std::size_t i = 0; i < connections.size(); ++i) {
    const std::string ptr = "/connections/" + std::to_string(i);
    Reader r(connections[i], ptr);
    r.allow_only({"from", "to"});
    doc.connections.push_back(
        {read_endpoint(r.get("from"), ptr + "/from"), read_endpoint(r.get("to"), ptr + "/to")});
  }
  validate(doc);
  return doc;
}

std::string save_doc(const PrototypeDoc& doc) { return doc_to_json(doc).dump(2) + "\n"; }

PrototypeDoc load_doc(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw DocumentError("", std::string("malformed JSON: ") + e.what());
  }
  return doc_from_json(j);
}

// ---- wire edits ----

namespace {

std::string edit_string(const json& edit, const char* key) {
  if (!edit.contains(key) || !edit[key].is_string()) {
    throw Error(ErrorCode::BadParam, std::string("edit needs string field '") + key + "'");
  }
  return edit[key].get<std::string>();
}

double edit_number(const json& edit, const char* key) {
  if (!edit.contains(key) || !edit[key].is_number()) {
    throw Error(ErrorCode::BadParam, std::string("edit needs number field '") + key + "'");
  }
  return edit[key].get<double>();
}

Vec2 edit_position(const json& edit) {
  if (!edit.contains("position") || !edit["position"].is_object()) {
    throw Error(ErrorCode::BadParam, "edit needs a position {u, v}");
  }
  return {edit_number(edit["position"], "u"), edit_number(edit["position"], "v")};
}

Connection edit_connection(const json& edit) {
  auto endpoint = [&](const char* key) {
    if (!edit.contains(key) || !edit[key].is_object()) {
      throw Error(ErrorCode::BadParam, std::string("edit needs endpoint '") + key + "'");
    }
    return Endpoint{edit_string(edit[key], "element"), edit_string(edit[key], "port")};
  };
  return {endpoint("from"), endpoint("to")};
}

void require_edit_mode(const PrototypeDoc& doc, std::string_view op) {
  if (doc.mode != Mode::Edit) {
    throw Error(ErrorCode::BadParam, "'" + std::string(op) + "' needs edit mode");
  }
}

}  // namespace

PrototypeDoc apply_edit(const PrototypeDoc& doc, const json& edit) {
  if (!edit.is_object()) throw Error(ErrorCode::BadParam, "edit must be an object");
  const std::string op = edit_string(edit, "op");
  PrototypeDoc d = doc;
  if (op == "place") {
    require_edit_mode(d, op);
    const std::string tid = edit_string(edit, "template");
    const PaletteTemplate* t = d.find_template(tid);
    if (!t) throw Error(ErrorCode::UnknownElement, "no palette template '" + tid + "'");
    const PaletteTemplate copy = *t;
    place(d, copy, unique_element_id(d, tid), edit_position(edit));
  } else if (op == "move") {
    require_edit_mode(d, op);
    PanelElement& e = require(d, edit_string(edit, "element"));
    const Vec2 p = edit_position(edit);
    e.bounds = clamp_to_panel({p.x, p.y, e.bounds.w, e.bounds.h});
  } else if (op == "resize") {
    require_edit_mode(d, op);
    PanelElement& e = require(d, edit_string(edit, "element"));
    e.bounds = clamp_to_panel({e.bounds.u, e.bounds.v, edit_number(edit, "w"), edit_number(edit, "h")});
  } else if (op == "lock") {
    PanelElement& e = require(d, edit_string(edit, "element"));
    if (!edit.contains("locked") || !edit["locked"].is_boolean()) {
      throw Error(ErrorCode::BadParam, "lock edit needs boolean 'locked'");
    }
    e.locked = edit["locked"].get<bool>();
  } else if (op == "connect") {
    const Connection c = edit_connection(edit);
    require(d, c.from.element);
    require(d, c.to.element);
    d.connections.push_back(c);
  } else if (op == "disconnect") {
    const Connection c = edit_connection(edit);
    const auto it = std::find(d.connections.begin(), d.connections.end(), c);
    if (it == d.connections.end()) throw Error(ErrorCode::BadParam, "no such connection");
    d.connections.erase(it);
  } else if (op == "remove") {
    require_edit_mode(d, op);
    const std::string id = edit_string(edit, "element");
    require(d, id);
    std::erase_if(d.elements, [&](const PanelElement& e) { return e.id == id; });
    std::erase_if(d.connections,
                  [&](const Connection& c) { return c.from.element == id || c.to.element == id; });
  } else if (op == "set_mode") {
    const auto m = mode_from_string(edit_string(edit, "mode"));
    if (!m) throw Error(ErrorCode::BadParam, "mode must be \"edit\" or \"run\"");
    d.mode = *m;
  } else if (op == "replace") {
    if (!edit.contains("doc")) throw Error(ErrorCode::BadParam, "replace edit needs 'doc'");
    return doc_from_json(edit["doc"]);
  } else {
    throw Error(ErrorCode::BadParam, "unknown edit op '" + op + "'");
  }
  validate(d);
  return d;
}

}  // namespace vip

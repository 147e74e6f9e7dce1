#include "vip/session.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "vip/error.hpp"
#include "vip/image_io.hpp"

namespace vip {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& pointer, const std::string& message) {
  throw Error(ErrorCode::BadConfig, (pointer.empty() ? "/" : pointer) + ": " + message);
}

// Reads fields off one JSON object and rejects whatever it did not ask for.
class Fields {
 public:
  Fields(const json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {
    if (!j.is_object()) bad(ptr_, "expected an object");
  }

  std::string at(std::string_view key) const { return ptr_ + "/" + std::string(key); }
  bool has(std::string_view key) const { return j_.contains(key); }

  const json& raw(std::string_view key) {
    seen_.insert(std::string(key));
    return j_.at(std::string(key));
  }

  template <class T>
  void read(std::string_view key, T& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) bad(at(key), "expected a string");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) bad(at(key), "expected a boolean");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) bad(at(key), "expected a number");
        if constexpr (std::is_integral_v<T>) {
          if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<double>() < 0)) {
            bad(at(key), "expected a non-negative integer");
          }
        }
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      bad(at(key), e.what());
    }
  }

  template <class T>
  T require(std::string_view key) {
    if (!has(key)) bad(at(key), "missing");
    T out{};
    read(key, out);
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) bad(at(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string, std::less<>> seen_;
};

Rgb read_rgb(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.size() != 3) bad(ptr, "expected [r, g, b]");
  Rgb c;
  std::uint8_t* out[] = {&c.r, &c.g, &c.b};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number_integer() || v[i].get<int>() < 0 || v[i].get<int>() > 255) {
      bad(ptr + "/" + std::to_string(i), "expected an integer in [0, 255]");
    }
    *out[i] = static_cast<std::uint8_t>(v[i].get<int>());
  }
  return c;
}

Vec2 read_point(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    bad(ptr, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

FrameRect read_rect(const json& v, const std::string& ptr) {
  Fields f(v, ptr);
  FrameRect r;
  r.x = f.require<double>("x");
  r.y = f.require<double>("y");
  r.w = f.require<double>("w");
  r.h = f.require<double>("h");
  f.finish();
  if (!(r.w > 0 && r.h > 0)) bad(ptr, "palette rect needs a positive size");
  return r;
}

std::filesystem::path existing(const std::filesystem::path& base, const std::string& rel,
                               const std::string& ptr, bool directory) {
  const std::filesystem::path p = base / rel;
  std::error_code ec;
  const bool ok = directory ? std::filesystem::is_directory(p, ec)
                            : std::filesystem::is_regular_file(p, ec);
  if (!ok) bad(ptr, std::string(directory ? "no directory " : "no file ") + p.string());
  return p;
}

// "wire" or {"<key>": path}
std::optional<std::filesystem::path> read_source(Fields& top, std::string_view medium,
                                                 std::string_view key,
                                                 const std::filesystem::path& base,
                                                 bool directory) {
  const std::string ptr = top.at(medium);
  if (!top.has(medium)) bad(ptr, "missing");
  const json& v = top.raw(medium);
  if (v.is_string()) {
    if (v.get<std::string>() != "wire") bad(ptr, "expected \"wire\" or an object");
    return std::nullopt;
  }
  Fields f(v, ptr);
  const auto rel = f.require<std::string>(key);
  f.finish();
  return existing(base, rel, f.at(key), directory);
}

void read_scene(const json& v, const std::string& ptr, synth::SceneSpec& scene) {
  Fields f(v, ptr);
  f.read("width", scene.width);
  f.read("height", scene.height);
  if (scene.width < 8 || scene.height < 8) bad(ptr, "scene must be at least 8x8");
  if (f.has("background")) scene.background = read_rgb(f.raw("background"), f.at("background"));
  if (f.has("object")) scene.object = read_rgb(f.raw("object"), f.at("object"));
  if (f.has("palette")) scene.palette = read_rgb(f.raw("palette"), f.at("palette"));
  f.read("marker_radius", scene.marker_radius);
  if (f.has("quad")) {
    const json& q = f.raw("quad");
    if (!q.is_array() || q.size() != 4) bad(f.at("quad"), "expected four [x, y] corners");
    for (std::size_t i = 0; i < 4; ++i) {
      scene.quad.corners[i] = read_point(q[i], f.at("quad") + "/" + std::to_string(i));
    }
    if (!scene.quad.simple()) bad(f.at("quad"), "corners must be TL, TR, BR, BL of a simple quad");
  }
  if (f.has("markers")) {
    const json& m = f.raw("markers");
    if (!m.is_object()) bad(f.at("markers"), "expected {id: [r, g, b]}");
    scene.markers.clear();
    for (auto it = m.begin(); it != m.end(); ++it) {
      scene.markers.push_back({it.key(), read_rgb(*it, f.at("markers") + "/" + it.key())});
    }
  }
  f.finish();
}

}  // namespace

SessionConfig session_config_from_json(const json& j, const std::filesystem::path& base) {
  SessionConfig cfg;
  Fields top(j, "");
  if (top.require<int>("version") != 1) bad("/version", "unsupported version");

  cfg.doc_path = existing(base, top.require<std::string>("doc"), "/doc", false);
  cfg.frames_dir = read_source(top, "frames", "directory", base, true);
  cfg.wav_path = read_source(top, "audio", "wav", base, false);
  if (top.has("log")) cfg.log_path = base / top.require<std::string>("log");
  if (top.has("save_doc")) cfg.save_doc_path = base / top.require<std::string>("save_doc");

  if (!top.has("markers")) bad("/markers", "missing");
  const json& markers = top.raw("markers");
  if (!markers.is_array() || markers.empty()) bad("/markers", "expected a non-empty array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    const std::string ptr = "/markers/" + std::to_string(i);
    Fields f(markers[i], ptr);
    MarkerConfig m;
    m.id = f.require<std::string>("id");
    if (!ids.insert(m.id).second) bad(ptr + "/id", "duplicate marker id");
    if (!f.has("hsv")) bad(ptr + "/hsv", "missing");
    Fields h(f.raw("hsv"), ptr + "/hsv");
    m.range.hue_min = h.require<double>("hue_min");
    m.range.hue_max = h.require<double>("hue_max");
    h.read("sat_min", m.range.sat_min);
    h.read("sat_max", m.range.sat_max);
    h.read("val_min", m.range.val_min);
    h.read("val_max", m.range.val_max);
    h.finish();
    if (!m.range.valid()) bad(ptr + "/hsv", "min above max");
    f.read("min_area", m.min_area);
    f.finish();
    cfg.markers.push_back(std::move(m));
  }

  if (top.has("click")) {
    Fields f(top.raw("click"), "/click");
    f.read("f_low", cfg.click.f_low);
    f.read("f_high", cfg.click.f_high);
    f.read("level_threshold", cfg.click.level_threshold);
    f.read("window", cfg.click.window);
    f.read("debounce_ms", cfg.click.debounce_ms);
    f.read("max_skew_ms", cfg.max_skew_ms);
    f.finish();
  }
  if (top.has("canny")) {
    Fields f(top.raw("canny"), "/canny");
    f.read("sigma", cfg.canny.sigma);
    f.read("t_high", cfg.canny.t_high);
    f.read("ratio", cfg.canny.ratio);
    f.finish();
    try {
      cfg.canny.validate();
    } catch (const Error& e) {
      bad("/canny", e.detail());
    }
  }
  if (top.has("gesture")) {
    Fields f(top.raw("gesture"), "/gesture");
    GestureConfig& g = cfg.gesture;
    f.read("primary", g.primary);
    f.read("secondary", g.secondary);
    if (f.has("palette")) g.palette = read_rect(f.raw("palette"), f.at("palette"));
    f.read("pinch_inflate", g.pinch_inflate);
    f.read("wipe_corner", g.wipe_corner);
    f.read("wipe_rise", g.wipe_rise);
    f.read("wipe_frames", g.wipe_frames);
    f.read("scan_epsilon_px", g.scan_epsilon_px);
    f.finish();
    if (g.wipe_frames < 2) bad("/gesture/wipe_frames", "need at least 2 frames");
  }
  if (!ids.contains(cfg.gesture.primary)) bad("/gesture/primary", "not a configured marker");
  if (!ids.contains(cfg.gesture.secondary)) bad("/gesture/secondary", "not a configured marker");

  if (top.has("render")) {
    Fields f(top.raw("render"), "/render");
    f.read("width", cfg.panel_width);
    f.read("height", cfg.panel_height);
    f.finish();
    if (cfg.panel_width < 1 || cfg.panel_height < 1) bad("/render", "size must be positive");
  }
  top.read("history_frames", cfg.history_frames);
  if (cfg.history_frames < 1) bad("/history_frames", "must be at least 1");

  if (top.has("wire")) {
    Fields f(top.raw("wire"), "/wire");
    f.read("tick_ms", cfg.tick_ms);
    f.read("sample_rate", cfg.sample_rate);
    if (f.has("scene")) read_scene(f.raw("scene"), f.at("scene"), cfg.scene);
    f.finish();
    if (!(cfg.tick_ms > 0)) bad("/wire/tick_ms", "must be positive");
  }
  cfg.scene.palette_rect = cfg.gesture.palette;
  for (const auto& m : cfg.markers) {
    const bool painted = std::any_of(cfg.scene.markers.begin(), cfg.scene.markers.end(),
                                     [&](const synth::SceneMarker& s) { return s.id == m.id; });
    if (!painted && !cfg.frames_dir) bad("/wire/scene/markers", "no colour for marker '" + m.id + "'");
  }
  top.finish();

  try {
    cfg.click.validate(cfg.sample_rate);
  } catch (const Error& e) {
    // File audio brings its own rate; that is checked when the WAV is opened.
    if (!cfg.wav_path) bad("/click", e.detail());
  }
  return cfg;
}

SessionConfig load_session_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::BadConfig, path.string() + ": " + e.what());
  }
  return session_config_from_json(j, path.parent_path());
}

}  // namespace vip

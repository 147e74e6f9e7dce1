#include "vip/scenario.hpp"

#include <cmath>

#include "vip/audio.hpp"
#include "vip/error.hpp"
#include "vip/gesture.hpp"
#include "vip/image_io.hpp"

namespace vip::scenario {

Script& Script::hold(std::optional<Vec2> p, int n) {
  for (int i = 0; i < n; ++i) ticks_.push_back({p, std::nullopt, false});
  last_ = p;
  return *this;
}

Script& Script::glide(Vec2 to, int n) {
  const Vec2 from = last_.value_or(to);
  for (int i = 1; i <= n; ++i) {
    ticks_.push_back({from + (static_cast<double>(i) / n) * (to - from), std::nullopt, false});
  }
  last_ = to;
  return *this;
}

Script& Script::tap(Vec2 p, int settle, int after) {
  if (settle < 1) throw Error(ErrorCode::BadParam, "tap needs at least one settling tick");
  hold(p, settle);
  ticks_.back().tap = true;
  return hold(p, after);
}

Script& Script::with_secondary(std::optional<Vec2> p, int n, std::optional<Vec2> primary) {
  for (int i = 0; i < n; ++i) ticks_.push_back({primary, p, false});
  last_ = primary;
  return *this;
}

std::int64_t tick_timestamp(std::int64_t tick, double tick_ms) {
  return std::llround(static_cast<double>(tick) * tick_ms);
}

AudioChunk RecordedSession::audio(const synth::ToneBurst& burst) const {
  const double end_ms =
      frames.empty() ? 0.0 : static_cast<double>(frames.back().timestamp_ms()) + tick_ms;
  const auto n = static_cast<std::size_t>(synth::sample_at(end_ms, sample_rate));
  return synth::render_taps(tap_times_ms, 0, n, sample_rate, burst);
}

RecordedSession record(const synth::SceneSpec& scene, const Script& script, double tick_ms,
                       const std::string& primary_id, const std::string& secondary_id,
                       double sample_rate) {
  RecordedSession rec;
  rec.sample_rate = sample_rate;
  rec.tick_ms = tick_ms;
  std::int64_t k = 0;
  for (const ScriptTick& t : script.ticks()) {
    const std::int64_t ts = tick_timestamp(k++, tick_ms);
    const synth::MarkerPlacement placed[] = {{primary_id, t.primary}, {secondary_id, t.secondary}};
    rec.frames.push_back(synth::render_scene(scene, placed, ts));
    if (t.tap) rec.tap_times_ms.push_back(static_cast<double>(ts));
  }
  return rec;
}

void write_recording(const std::filesystem::path& dir, const RecordedSession& rec) {
  io::write_frame_stream(dir / "frames", rec.frames);
  io::write_wav(dir / "taps.wav", rec.audio());
}

nlohmann::ordered_json default_session_json(const std::string& doc_file) {
  using nlohmann::ordered_json;
  auto hsv = [](double h0, double h1) {
    return ordered_json{{"hue_min", h0}, {"hue_max", h1}, {"sat_min", 0.5},
                        {"sat_max", 1.0}, {"val_min", 0.4}, {"val_max", 1.0}};
  };
  return {
      {"version", 1},
      {"doc", doc_file},
      {"frames", {{"directory", "frames"}}},
      {"audio", {{"wav", "taps.wav"}}},
      {"log", "events.jsonl"},
      {"markers",
       ordered_json::array({{{"id", "index"}, {"hsv", hsv(340, 20)}, {"min_area", 25}},
                            {{"id", "thumb"}, {"hsv", hsv(90, 150)}, {"min_area", 25}}})},
      {"click",
       {{"f_low", 800}, {"f_high", 4000}, {"level_threshold", 0.15}, {"window", 256},
        {"debounce_ms", 150}, {"max_skew_ms", 60}}},
      {"canny", {{"sigma", 1.0}, {"t_high", 0.5}, {"ratio", 2.5}}},
      {"gesture",
       {{"primary", "index"}, {"secondary", "thumb"},
        {"palette", {{"x", 4}, {"y", 4}, {"w", 40}, {"h", 160}}}}},
      {"render", {{"width", 240}, {"height", 180}}},
      {"wire", {{"tick_ms", 40}, {"sample_rate", 16000}}},
  };
}

PrototypeDoc atm_doc() {
  PrototypeDoc d;
  PaletteTemplate card;
  card.id = "card-btn";
  card.kind = ElementKind::Button;
  card.w = 0.2;
  card.h = 0.12;
  card.text = "CARD";
  card.links = {{"pressed", {"screen", "advance"}}};
  PaletteTemplate lock;
  lock.id = "lock";
  lock.kind = ElementKind::LockControl;
  d.palette = {card, lock};

  PanelElement screen;
  screen.id = "screen";
  screen.kind = ElementKind::Screen;
  screen.bounds = {0.3, 0.05, 0.65, 0.55};
  screen.locked = true;
  for (int i = 0; i < 10; ++i) screen.frames.push_back("screens/" + std::to_string(i) + ".ppm");
  PanelElement key;
  key.id = "pin-key";
  key.kind = ElementKind::Button;
  key.bounds = {0.05, 0.7, 0.15, 0.15};
  key.z = 1;
  key.text = "1";
  d.elements = {screen, key};
  d.connections = {{{"pin-key", "pressed"}, {"screen", "advance"}}};
  return d;
}

Frame atm_screen_frame(int index) {
  // One lit cell per step so every frame is distinct.
  Frame f(40, 30, Rgb{10, 30, 60});
  const int cx = 2 + (index % 5) * 7, cy = 4 + (index / 5) * 12;
  for (int y = cy; y < cy + 9; ++y) {
    for (int x = cx; x < cx + 6; ++x) f.at(x, y) = {240, 220, static_cast<std::uint8_t>(20 * index)};
  }
  return f;
}

Script atm_script(const SessionConfig& cfg, const PrototypeDoc& doc) {
  const DisplayQuad& q = cfg.scene.quad;
  auto at = [&](double u, double v) { return from_panel_coords({u, v}, q); };
  const Vec2 card_slot = palette_slot_center(cfg.gesture, doc, 0);
  const Vec2 lock_slot = palette_slot_center(cfg.gesture, doc, doc.palette.size() - 1);
  Script s;
  s.hold(std::nullopt, 5);
  s.tap(card_slot);                 // Select(card-btn)
  s.glide(at(0.1, 0.25), 6);
  s.tap(at(0.1, 0.25));             // Place at origin (0.1, 0.25)
  s.glide(lock_slot, 6);
  s.tap(lock_slot);                 // Lock(card-btn)
  s.glide(at(0.2, 0.31), 6);
  s.tap(at(0.2, 0.31));             // Click(card-btn): screen 0 -> 1
  s.glide(at(0.125, 0.775), 6);
  s.tap(at(0.125, 0.775));          // DragMove(pin-key) starts the drag
  s.glide(at(0.5, 0.78), 10);
  s.tap(at(0.5, 0.78));             // DragEnd(pin-key)
  s.glide(lock_slot, 8);
  s.tap(lock_slot);                 // Lock(pin-key)
  s.glide(at(0.5, 0.78), 8);
  for (int i = 0; i < 4; ++i) s.tap(at(0.5, 0.78));  // Click(pin-key) x4: 1 -> 5
  s.hold(std::nullopt, 8);
  return s;
}

std::filesystem::path write_atm_session(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "screens");
  const PrototypeDoc doc = atm_doc();
  for (int i = 0; i < 10; ++i) {
    io::write_ppm(dir / "screens" / (std::to_string(i) + ".ppm"), atm_screen_frame(i));
  }
  io::write_file(dir / "doc.json", save_doc(doc));

  // Sources must exist before the config can be loaded; write placeholders,
  // then the real recording.
  std::filesystem::create_directories(dir / "frames");
  io::write_wav(dir / "taps.wav", AudioChunk{});
  const auto session = dir / "session.json";
  io::write_file(session, default_session_json().dump(2) + "\n");
  const SessionConfig cfg = load_session_config(session);

  const RecordedSession rec = record(cfg.scene, atm_script(cfg, doc), cfg.tick_ms,
                                     cfg.gesture.primary, cfg.gesture.secondary, cfg.sample_rate);
  write_recording(dir, rec);
  return session;
}

}  // namespace vip::scenario

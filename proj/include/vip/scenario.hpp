#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vip/panel.hpp"
#include "vip/session.hpp"
#include "vip/synth.hpp"

// Scripted sessions: a marker path with taps, turned into the frame stream
// and WAV a camera and microphone would have produced.
namespace vip::scenario {

struct ScriptTick {
  std::optional<Vec2> primary;    // frame px
  std::optional<Vec2> secondary;
  bool tap = false;               // burst starts at this tick's timestamp
};

class Script {
 public:
  // Primary at p for n ticks; nullopt hides it.
  Script& hold(std::optional<Vec2> p, int n);
  // Straight line from the current position, n ticks, ending on `to`.
  Script& glide(Vec2 to, int n);
  // Settle on p, tap on the last settling tick, then stay for `after` ticks
  // so the debounced click can be confirmed before anything moves.
  Script& tap(Vec2 p, int settle = 12, int after = 10);
  Script& with_secondary(std::optional<Vec2> p, int n, std::optional<Vec2> primary);

  const std::vector<ScriptTick>& ticks() const noexcept { return ticks_; }

 private:
  std::optional<Vec2> last_;
  std::vector<ScriptTick> ticks_;
};

struct RecordedSession {
  std::vector<Frame> frames;
  std::vector<double> tap_times_ms;
  double sample_rate = 16000.0;
  double tick_ms = 40.0;

  // Whole tap track, one tick past the last frame.
  AudioChunk audio(const synth::ToneBurst& burst = {}) const;
};

// Tick k is stamped round(k * tick_ms).
std::int64_t tick_timestamp(std::int64_t tick, double tick_ms);

RecordedSession record(const synth::SceneSpec& scene, const Script& script, double tick_ms,
                       const std::string& primary_id, const std::string& secondary_id,
                       double sample_rate = 16000.0);

// frames/ (manifest + PPMs) and taps.wav under dir.
void write_recording(const std::filesystem::path& dir, const RecordedSession& rec);

// Red index and green thumb markers, default click, canny and gesture
// settings, file sources frames/ and taps.wav, log events.jsonl.
nlohmann::ordered_json default_session_json(const std::string& doc_file = "doc.json");

// ATM prototype: a ten-frame Screen, a pre-placed unlocked keypad Button
// wired to Screen.advance and a card-reader template whose instances come
// pre-wired to it.
PrototypeDoc atm_doc();
Frame atm_screen_frame(int index);

// Insert card, lock it, click it, drag the key to the keypad row, lock it,
// then press it four times.
Script atm_script(const SessionConfig& config, const PrototypeDoc& doc);

// Writes doc, screen assets, recording and session.json; returns the
// session.json path.
std::filesystem::path write_atm_session(const std::filesystem::path& dir);

}  // namespace vip::scenario

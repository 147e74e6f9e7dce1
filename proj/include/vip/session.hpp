#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "vip/audio.hpp"
#include "vip/edges.hpp"
#include "vip/gesture.hpp"
#include "vip/synth.hpp"
#include "vip/tracker.hpp"

namespace vip {

// Everything a session needs, with paths already resolved against the config
// file's directory. An absent source path means the medium arrives over the
// wire.
struct SessionConfig {
  std::filesystem::path doc_path;
  std::optional<std::filesystem::path> frames_dir;
  std::optional<std::filesystem::path> wav_path;
  std::optional<std::filesystem::path> log_path;
  std::optional<std::filesystem::path> save_doc_path;

  std::vector<MarkerConfig> markers;
  ClickParams click;
  double max_skew_ms = 60.0;
  CannyParams canny;
  GestureConfig gesture;
  int panel_width = 240;
  int panel_height = 180;
  std::size_t history_frames = 32;

  // Wire sources: fixed tick, synthesized audio and scene.
  double tick_ms = 40.0;
  double sample_rate = 16000.0;
  synth::SceneSpec scene;
};

// Throws BadConfig with "<json pointer>: message" in the detail. Checks that
// referenced paths exist, marker ids are unique and the gesture markers are
// among them. Unknown keys are rejected.
SessionConfig session_config_from_json(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir);
SessionConfig load_session_config(const std::filesystem::path& path);

}  // namespace vip

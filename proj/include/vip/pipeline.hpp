#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vip/audio.hpp"
#include "vip/edges.hpp"
#include "vip/gesture.hpp"
#include "vip/panel.hpp"
#include "vip/raster.hpp"
#include "vip/renderer.hpp"
#include "vip/session.hpp"
#include "vip/tracker.hpp"

namespace vip {

// One camera frame plus the audio that arrived since the previous one.
struct TickInput {
  Frame frame;
  AudioChunk audio;
};

struct TickResult {
  nlohmann::ordered_json record;  // one event-log line
  std::vector<GestureEvent> events;
  bool doc_changed = false;
};

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string content_digest(std::span<const std::uint8_t> bytes);

// The per-tick chain shared by file replay and the wire service:
// display quad -> markers -> clicks -> tap fusion -> gesture step -> apply ->
// evaluate -> compose -> warp into a black frame of the camera size.
// Strictly sequential; one instance per session.
class Pipeline {
 public:
  Pipeline(const SessionConfig& config, PrototypeDoc doc, double sample_rate);

  // Frame timestamps must strictly increase; audio must be at sample_rate.
  TickResult step(const TickInput& input);

  // Out-of-band edit (wire DocEdit/ModeChange); same semantics as apply_edit.
  // Returns true when the doc changed, which bumps the revision.
  bool edit(const nlohmann::json& edit);

  const PrototypeDoc& doc() const noexcept { return doc_; }
  std::uint64_t revision() const noexcept { return revision_; }
  std::int64_t ticks() const noexcept { return tick_; }
  std::optional<std::int64_t> last_timestamp_ms() const noexcept { return last_ts_; }
  double sample_rate() const noexcept { return rate_; }

  // Composite of the current doc at the configured panel size; cached per
  // revision.
  const Frame& panel();
  const Frame& last_output() const noexcept { return output_; }

 private:
  void set_doc(PrototypeDoc doc);

  SessionConfig cfg_;
  double rate_;
  PrototypeDoc doc_;
  std::uint64_t revision_ = 0;
  AssetCache assets_;
  QuadTracker quads_;
  std::vector<MarkerState> markers_;
  BandPassFilter filter_;
  ClickDetector clicks_;
  std::deque<TrackedFrame> history_;
  GestureState gestures_;
  std::int64_t tick_ = 0;
  std::optional<std::int64_t> last_ts_;
  std::optional<std::uint64_t> panel_revision_;
  std::vector<std::string> panel_diagnostics_;
  Frame panel_;
  Frame output_;
};

struct SessionEventLog {
  std::vector<nlohmann::ordered_json> records;
  PrototypeDoc final_doc;

  std::string to_jsonl() const;
};

// File replay. Frames come from the manifest in frames_dir, audio from the
// WAV, sliced per tick by timestamp: tick k gets samples
// [round(T_{k-1} fs), round(T_k fs)) with T_{-1} = 0. An ingest thread
// decodes ahead through a bounded queue. Each record is appended to the log
// file (when configured) before the next tick starts. Throws BadConfig for
// wire sources; decode errors abort with file and offset.
SessionEventLog run_session(const SessionConfig& config,
                            const std::function<void(const nlohmann::ordered_json&)>& on_record = {});

// Loads and validates the session's document; Screen assets resolve
// relative to its directory.
PrototypeDoc load_session_doc(const SessionConfig& config);

}  // namespace vip

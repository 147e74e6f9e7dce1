#include "vip/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>
#include <variant>

#include "vip/error.hpp"
#include "vip/image_io.hpp"
#include "vip/log.hpp"
#include "vip/queue.hpp"

namespace vip {
namespace {

using nlohmann::ordered_json;

ordered_json point_json(Vec2 p) { return ordered_json::array({p.x, p.y}); }

ordered_json quad_json(const std::optional<DisplayQuad>& q) {
  if (!q) return nullptr;
  ordered_json corners = ordered_json::array();
  for (const Vec2& c : q->corners) corners.push_back(point_json(c));
  return {{"corners", corners}, {"confidence", q->confidence}};
}

ordered_json marker_json(const MarkerState& m) {
  return {{"id", m.id},
          {"position", m.position ? point_json(*m.position) : ordered_json(nullptr)},
          {"velocity", point_json(m.velocity)}};
}

}  // namespace

std::string content_digest(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Pipeline::Pipeline(const SessionConfig& config, PrototypeDoc doc, double sample_rate)
    : cfg_(config),
      rate_(sample_rate),
      doc_(std::move(doc)),
      assets_(config.doc_path.parent_path()),
      filter_(config.click.f_low, config.click.f_high, sample_rate),
      clicks_(config.click, sample_rate) {
  validate(doc_);
}

void Pipeline::set_doc(PrototypeDoc doc) {
  doc_ = std::move(doc);
  ++revision_;
}

bool Pipeline::edit(const nlohmann::json& e) {
  PrototypeDoc next = apply_edit(doc_, e);
  if (next == doc_) return false;
  set_doc(std::move(next));
  return true;
}

const Frame& Pipeline::panel() {
  if (panel_revision_ != revision_) {
    panel_diagnostics_.clear();
    try {
      panel_ = compose_panel(doc_, cfg_.panel_width, cfg_.panel_height, assets_);
    } catch (const Error& e) {
      // A doc pointing at unreadable Screen frames still renders, without them.
      panel_diagnostics_.push_back(std::string("render: ") + e.what());
      PrototypeDoc stripped = doc_;
      for (PanelElement& el : stripped.elements) el.frames.clear();
      panel_ = compose_panel(stripped, cfg_.panel_width, cfg_.panel_height, assets_);
    }
    panel_revision_ = revision_;
  }
  return panel_;
}

TickResult Pipeline::step(const TickInput& in) {
  const Frame& frame = in.frame;
  if (last_ts_ && frame.timestamp_ms() <= *last_ts_) {
    throw Error(ErrorCode::BadParam, "frame timestamps must strictly increase");
  }
  std::vector<std::string> diagnostics;

  const BinaryMask edges = canny(to_gray(frame), cfg_.canny);
  const std::optional<DisplayQuad> quad = quads_.update(edges);
  markers_ = track_markers(frame, cfg_.markers, markers_, tick_);

  const std::vector<ClickEvent> clicks = clicks_.push(filter_.process(in.audio));
  history_.push_back({static_cast<double>(frame.timestamp_ms()), markers_});
  while (history_.size() > cfg_.history_frames) history_.pop_front();

  std::optional<TapEvent> tap;
  {
    const std::vector<TrackedFrame> hist(history_.begin(), history_.end());
    for (const ClickEvent& c : clicks) {
      auto t = fuse_click(hist, c, cfg_.gesture.primary, cfg_.max_skew_ms);
      if (!t) {
        diagnostics.push_back("click at " + format_number(c.time_ms) +
                              " ms has no primary marker nearby");
      } else if (tap) {
        diagnostics.push_back("second click in one tick dropped");
      } else {
        tap = std::move(t);
      }
    }
  }

  GestureStep g = vip::step(gestures_, {markers_, tap, quad}, doc_, cfg_.gesture);
  gestures_ = std::move(g.state);
  diagnostics.insert(diagnostics.end(), g.diagnostics.begin(), g.diagnostics.end());

  PrototypeDoc next = doc_;
  std::vector<Effect> effects;
  for (const GestureEvent& ev : g.events) {
    try {
      ApplyResult r = apply_gesture(next, ev);
      next = std::move(r.doc);
      effects.insert(effects.end(), r.effects.begin(), r.effects.end());
    } catch (const Error& e) {
      diagnostics.push_back(std::string("apply: ") + e.what());
    }
  }
  next = evaluate_graph(next, effects);
  TickResult result;
  if (next != doc_) {
    set_doc(std::move(next));
    result.doc_changed = true;
  } else {
    doc_.resize_base = next.resize_base;
  }

  const Frame& composite = panel();
  diagnostics.insert(diagnostics.end(), panel_diagnostics_.begin(), panel_diagnostics_.end());
  output_ = Frame(frame.width(), frame.height(), Rgb{}, frame.timestamp_ms());
  if (quad) {
    try {
      output_ = warp_into(composite, fit_quad(composite.width(), composite.height(), *quad).transform,
                          std::move(output_));
    } catch (const Error& e) {
      diagnostics.push_back(std::string("warp: ") + e.what());
    }
  }

  ordered_json markers = ordered_json::array();
  for (const MarkerState& m : markers_) markers.push_back(marker_json(m));
  ordered_json click_list = ordered_json::array();
  for (const ClickEvent& c : clicks) {
    click_list.push_back({{"time_ms", c.time_ms}, {"peak_level", c.peak_level}});
  }
  ordered_json events = ordered_json::array();
  for (const GestureEvent& ev : g.events) events.push_back(to_json(ev));

  ordered_json& r = result.record;
  r["tick"] = tick_;
  r["timestamp_ms"] = frame.timestamp_ms();
  r["quad"] = quad_json(quad);
  r["markers"] = std::move(markers);
  r["clicks"] = std::move(click_list);
  r["tap"] = tap ? ordered_json{{"time_ms", tap->time_ms},
                                {"position", point_json(tap->position)},
                                {"marker", tap->marker_id}}
                 : ordered_json(nullptr);
  r["gestures"] = std::move(events);
  r["diagnostics"] = diagnostics;
  r["doc_revision"] = revision_;
  r["render_digest"] = content_digest(output_.bytes());

  result.events = std::move(g.events);
  last_ts_ = frame.timestamp_ms();
  ++tick_;
  return result;
}

std::string SessionEventLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

PrototypeDoc load_session_doc(const SessionConfig& config) {
  return load_doc(io::read_file(config.doc_path));
}

namespace {

struct EndOfStream {};
using Item = std::variant<TickInput, std::exception_ptr, EndOfStream>;

void ingest(const SessionConfig& cfg, const std::vector<io::StreamEntry>& entries,
            const AudioChunk& audio, BoundedQueue<Item>& queue) {
  try {
    const auto total = static_cast<std::int64_t>(audio.samples.size());
    std::int64_t cursor = 0;
    for (const io::StreamEntry& e : entries) {
      TickInput in;
      in.frame = io::read_ppm(*cfg.frames_dir / e.file);
      in.frame.set_timestamp_ms(e.timestamp_ms);
      const std::int64_t end =
          std::clamp<std::int64_t>(synth::sample_at(static_cast<double>(e.timestamp_ms), audio.sample_rate),
                                   cursor, total);
      in.audio.sample_rate = audio.sample_rate;
      in.audio.start_time_ms = 1000.0 * static_cast<double>(cursor) / audio.sample_rate;
      in.audio.samples.assign(audio.samples.begin() + cursor, audio.samples.begin() + end);
      cursor = end;
      if (!queue.push(std::move(in))) return;
    }
    queue.push(EndOfStream{});
  } catch (...) {
    queue.push(std::current_exception());
  }
}

}  // namespace

SessionEventLog run_session(const SessionConfig& cfg,
                            const std::function<void(const ordered_json&)>& on_record) {
  if (!cfg.frames_dir || !cfg.wav_path) {
    throw Error(ErrorCode::BadConfig, "run needs a frame directory and a WAV file");
  }
  const std::vector<io::StreamEntry> entries = io::read_manifest(*cfg.frames_dir);
  const AudioChunk audio = io::read_wav(*cfg.wav_path);
  try {
    cfg.click.validate(audio.sample_rate);
  } catch (const Error& e) {
    throw Error(ErrorCode::BadConfig, "/click: " + e.detail());
  }

  SessionEventLog log;
  Pipeline pipeline(cfg, load_session_doc(cfg), audio.sample_rate);
  std::ofstream file;
  if (cfg.log_path) {
    file.open(*cfg.log_path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::Io, "cannot write " + cfg.log_path->string());
  }

  BoundedQueue<Item> queue(8);
  std::thread reader(ingest, std::cref(cfg), std::cref(entries), std::cref(audio), std::ref(queue));
  try {
    while (auto item = queue.pop()) {
      if (std::holds_alternative<EndOfStream>(*item)) break;
      if (auto* err = std::get_if<std::exception_ptr>(&*item)) std::rethrow_exception(*err);
      TickResult r = pipeline.step(std::get<TickInput>(*item));
      if (file) {
        file << r.record.dump() << '\n';
        file.flush();
      }
      if (on_record) on_record(r.record);
      log.records.push_back(std::move(r.record));
    }
  } catch (...) {
    queue.close();
    reader.join();
    throw;
  }
  queue.close();
  reader.join();

  log.final_doc = pipeline.doc();
  if (cfg.save_doc_path) io::write_file(*cfg.save_doc_path, save_doc(log.final_doc));
  return log;
}

}  // namespace vip

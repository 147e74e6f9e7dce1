#include "vip/tracker.hpp"

#include <cmath>
#include <set>

#include "vip/error.hpp"

namespace vip {

const MarkerState* find_marker(std::span<const MarkerState> states, std::string_view id) {
  for (const MarkerState& s : states) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::vector<MarkerState> track_markers(const Frame& frame, std::span<const MarkerConfig> configs,
                                       std::span<const MarkerState> prev,
                                       std::int64_t frame_index, double alpha) {
  if (configs.empty()) throw Error(ErrorCode::BadParam, "no marker configs");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::BadParam, "alpha must lie in (0,1]");
  std::set<std::string_view> ids;
  for (const MarkerConfig& c : configs) {
    if (!ids.insert(c.id).second) throw Error(ErrorCode::BadParam, "duplicate marker id " + c.id);
  }

  std::vector<MarkerState> out;
  out.reserve(configs.size());
  for (const MarkerConfig& c : configs) {
    MarkerState s;
    s.id = c.id;
    const MarkerState* before = find_marker(prev, c.id);
    if (before) s.last_seen = before->last_seen;

    const auto rect = locate_marker(segment(frame, c.range), c.min_area);
    if (rect) {
      s.last_seen = frame_index;
      if (before && before->position) {
        const Vec2 p0 = *before->position;
        const Vec2 p = alpha * rect->center + (1.0 - alpha) * p0;
        s.position = p;
        s.velocity = p - p0;
      } else {
        s.position = rect->center;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<TapEvent> fuse_click(std::span<const TrackedFrame> history, const ClickEvent& click,
                                   std::string_view primary_marker, double max_skew_ms) {
  const TrackedFrame* best = nullptr;
  double best_dt = 0.0;
  for (const TrackedFrame& f : history) {
    const double dt = std::abs(f.timestamp_ms - click.time_ms);
    const bool better =
        !best || dt < best_dt || (dt == best_dt && f.timestamp_ms < best->timestamp_ms);
    if (better) {
      best = &f;
      best_dt = dt;
    }
  }
  if (!best || best_dt > max_skew_ms) return std::nullopt;
  const MarkerState* m = find_marker(best->markers, primary_marker);
  if (!m || !m->position) return std::nullopt;
  return TapEvent{click.time_ms, *m->position, std::string(primary_marker)};
}

}  // namespace vip

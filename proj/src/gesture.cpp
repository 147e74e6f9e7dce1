#include "vip/gesture.hpp"

#include <algorithm>
#include <cmath>

#include "vip/error.hpp"

namespace vip {
namespace {

void check_quad(const DisplayQuad& q) {
  double extent = 0.0;
  for (const Vec2& c : q.corners) extent = std::max(extent, distance(c, q.corners[0]));
  if (!q.simple() || std::abs(q.signed_area()) <= 1e-9 * std::max(1.0, extent * extent)) {
    throw Error(ErrorCode::DegenerateQuad, "display quad is self-intersecting or flat");
  }
}

}  // namespace

Vec2 from_panel_coords(Vec2 uv, const DisplayQuad& q) {
  const auto& [a, b, c, d] = q.corners;
  const double u = uv.x, v = uv.y;
  return (1 - u) * (1 - v) * a + u * (1 - v) * b + u * v * c + (1 - u) * v * d;
}

Vec2 to_panel_coords(Vec2 p, const DisplayQuad& q) {
  check_quad(q);
  const auto& [a, b, c, d] = q.corners;
  // p = a + u e + v f + u v g
  const Vec2 e = b - a, f = d - a, g = a - b + c - d, h = p - a;
  const double k2 = cross(g, f);
  const double k1 = cross(e, f) + cross(h, g);
  const double k0 = cross(h, e);
  const double scale = std::abs(cross(e, f)) + 1e-300;

  auto u_for = [&](double v) {
    const Vec2 den = e + v * g;
    return std::abs(den.x) >= std::abs(den.y) ? (h.x - f.x * v) / den.x : (h.y - f.y * v) / den.y;
  };

  Vec2 uv{0.5, 0.5};
  if (std::abs(k2) <= 1e-12 * scale) {
    if (std::abs(k1) > 0) {
      const double v = -k0 / k1;
      uv = {u_for(v), v};
    }
  } else {
    const double disc = k1 * k1 - 4 * k0 * k2;
    if (disc >= 0) {
      const double s = std::sqrt(disc);
      const double v1 = (-k1 - s) / (2 * k2), v2 = (-k1 + s) / (2 * k2);
      const Vec2 c1{u_for(v1), v1}, c2{u_for(v2), v2};
      // The root nearest the unit square is the sheet the quad lives on.
      auto off = [](Vec2 t) {
        return std::max({0.0, -t.x, t.x - 1, -t.y, t.y - 1});
      };
      uv = off(c1) <= off(c2) ? c1 : c2;
    }
  }
  // Newton polish on the forward map.
  for (int it = 0; it < 4; ++it) {
    const Vec2 r = from_panel_coords(uv, q) - p;
    const Vec2 du = e + uv.y * g, dv = f + uv.x * g;
    const double det = cross(du, dv);
    if (std::abs(det) < 1e-300) break;
    uv.x -= cross(r, dv) / det;
    uv.y -= cross(du, r) / det;
  }
  return uv;
}

std::optional<std::size_t> palette_slot(const GestureConfig& cfg, const PrototypeDoc& doc, Vec2 p) {
  if (doc.palette.empty() || !cfg.palette.contains(p)) return std::nullopt;
  const double slot_h = cfg.palette.h / static_cast<double>(doc.palette.size());
  const auto i = static_cast<std::size_t>((p.y - cfg.palette.y) / slot_h);
  return std::min(i, doc.palette.size() - 1);
}

Vec2 palette_slot_center(const GestureConfig& cfg, const PrototypeDoc& doc, std::size_t index) {
  const double slot_h = cfg.palette.h / static_cast<double>(std::max<std::size_t>(1, doc.palette.size()));
  return {cfg.palette.x + cfg.palette.w / 2, cfg.palette.y + slot_h * (index + 0.5)};
}

namespace {

bool in_unit_square(Vec2 uv) { return uv.x >= 0 && uv.x <= 1 && uv.y >= 0 && uv.y <= 1; }

class Stepper {
 public:
  Stepper(const GestureState& s, const GestureInput& in, const PrototypeDoc& doc,
          const GestureConfig& cfg)
      : in_(in), doc_(doc), cfg_(cfg) {
    out_.state = s;
    out_.state.mode = doc.mode;
    if (doc.mode != Mode::Edit) {
      out_.state.clipboard.reset();
      out_.state.drag.reset();
    }
    if (in.quad) {
      try {
        check_quad(*in.quad);
        quad_ = &*in.quad;
      } catch (const Error& e) {
        diag(e.what());
      }
    }
    // Elements may vanish through edits between ticks.
    if (st().drag && !doc.find(st().drag->element)) st().drag.reset();
    if (st().pinch && !doc.find(st().pinch->element)) st().pinch.reset();
    if (st().selection && !doc.find(*st().selection)) st().selection.reset();
  }

  GestureStep run() {
    const MarkerState* primary = find_marker(in_.markers, cfg_.primary);
    const MarkerState* secondary = find_marker(in_.markers, cfg_.secondary);
    primary_ = primary && primary->position ? primary->position : std::nullopt;
    secondary_ = secondary && secondary->position ? secondary->position : std::nullopt;
    if (primary_ && quad_) primary_uv_ = to_panel_coords(*primary_, *quad_);

    bool drag_emitted = false;
    if (in_.tap) drag_emitted = handle_tap(*in_.tap);
    if (!drag_emitted) drag_motion();
    pinch();
    scan();
    wipe();
    st().last_primary = primary_;
    return std::move(out_);
  }

 private:
  GestureState& st() { return out_.state; }
  const GestureState& st() const { return out_.state; }
  void diag(std::string msg) { out_.diagnostics.push_back(std::move(msg)); }
  void emit(GestureEvent ev) { out_.events.push_back(std::move(ev)); }

  bool handle_tap(const TapEvent& tap) {
    if (const auto slot = palette_slot(cfg_, doc_, tap.position)) {
      palette_tap(doc_.palette[*slot]);
      return false;
    }
    if (!quad_) {
      diag("tap dropped: no display quad");
      return false;
    }
    const Vec2 uv = to_panel_coords(tap.position, *quad_);
    if (!in_unit_square(uv)) {
      diag("tap dropped: outside panel and palette");
      return false;
    }
    if (st().drag) {
      const auto drag = *st().drag;
      emit({GestureKind::DragEnd, drag.element, uv, {}, {}, drag.offset});
      st().selection = drag.element;
      st().drag.reset();
      return false;
    }
    if (st().clipboard) {
      const std::string tid = *st().clipboard;
      const std::string id = unique_element_id(doc_, tid);
      emit({GestureKind::Place, id, uv, {}, tid, {}});
      st().clipboard.reset();
      st().selection = id;
      return false;
    }
    const PanelElement* hit = hit_test(doc_, uv);
    if (!hit) return false;
    if (hit->locked) {
      emit({GestureKind::Click, hit->id, uv, {}, {}, {}});
      return false;
    }
    if (doc_.mode == Mode::Edit && !st().pinch) {
      const Vec2 offset = uv - hit->bounds.origin();
      st().drag = GestureState::Drag{hit->id, offset};
      emit({GestureKind::DragMove, hit->id, uv, {}, {}, offset});
      return true;
    }
    diag("tap on unlocked element '" + hit->id + "' outside edit mode ignored");
    return false;
  }

  void palette_tap(const PaletteTemplate& t) {
    if (st().drag) {
      diag("palette tap ignored while dragging");
      return;
    }
    if (t.kind == ElementKind::LockControl) {
      if (!st().selection) {
        diag("Lock tapped with nothing selected");
        return;
      }
      emit({GestureKind::Lock, *st().selection, {}, {}, {}, {}});
      st().selection.reset();
      return;
    }
    if (doc_.mode != Mode::Edit) {
      diag("palette selection needs edit mode");
      return;
    }
    emit({GestureKind::Select, t.id, {}, {}, {}, {}});
    st().clipboard = t.id;
  }

  bool moved() const {
    return primary_ && st().last_primary &&
           distance(*primary_, *st().last_primary) > cfg_.scan_epsilon_px;
  }

  void drag_motion() {
    if (!st().drag || !primary_uv_ || !moved()) return;
    emit({GestureKind::DragMove, st().drag->element, *primary_uv_, {}, {}, st().drag->offset});
  }

  void pinch() {
    if (!quad_ || !primary_ || !secondary_) {
      st().pinch.reset();  // cancelled silently: no Resize without two markers
      st().pinch_armed = true;
      return;
    }
    const double d = distance(*primary_, *secondary_);
    if (st().pinch) {
      auto& p = *st().pinch;
      if (d > p.start_distance) {
        emit({GestureKind::ResizeEnd, p.element, {}, {}, {}, {}});
        st().pinch.reset();
        st().pinch_armed = false;
      } else if (d != p.last_distance) {
        p.last_distance = d;
        emit({GestureKind::ResizeMove, p.element, {}, d / p.start_distance, {}, {}});
      }
      return;
    }
    const Vec2 a = *primary_uv_, b = to_panel_coords(*secondary_, *quad_);
    const PanelElement* target = nullptr;
    for (const PanelElement& e : doc_.elements) {
      const Bounds zone = e.bounds.inflated(cfg_.pinch_inflate);
      if (!e.locked && zone.contains(a) && zone.contains(b) && (!target || e.z >= target->z)) {
        target = &e;
      }
    }
    if (!target) {
      st().pinch_armed = true;
      return;
    }
    if (!st().pinch_armed || doc_.mode != Mode::Edit || st().drag || !(d > 0)) return;
    st().pinch = GestureState::Pinch{d, d, target->id};
    emit({GestureKind::ResizeStart, target->id, {}, {}, {}, {}});
  }

  void scan() {
    if (st().drag || !moved()) return;
    if (primary_uv_ && in_unit_square(*primary_uv_)) {
      emit({GestureKind::Scan, std::string(kSurfacePanel), *primary_uv_, {}, {}, {}});
    } else if (cfg_.palette.contains(*primary_)) {
      emit({GestureKind::Scan, std::string(kSurfacePalette), primary_uv_, {}, {}, {}});
    }
  }

  bool in_corner(Vec2 uv) const {
    return uv.x >= 0 && uv.x <= cfg_.wipe_corner && uv.y >= 1 - cfg_.wipe_corner && uv.y <= 1;
  }

  void wipe() {
    auto& trace = st().wipe_trace;
    if (st().drag || st().pinch) {
      trace.clear();
      return;
    }
    trace.push_back(primary_uv_);
    while (trace.size() > cfg_.wipe_frames) trace.pop_front();
    if (!primary_uv_) return;

    // Longest monotone run ending now: v non-increasing for an upward wipe,
    // non-decreasing for a downward one.
    const std::size_t n = trace.size();
    std::size_t up = n - 1, down = n - 1;
    while (up > 0 && trace[up - 1] && trace[up - 1]->y >= trace[up]->y) --up;
    while (down > 0 && trace[down - 1] && trace[down - 1]->y <= trace[down]->y) --down;
    const Vec2 now = *primary_uv_;

    if (!doc_.inspector) {
      for (std::size_t i = up; i < n; ++i) {
        if (in_corner(*trace[i]) && trace[i]->y - now.y >= cfg_.wipe_rise) {
          emit({GestureKind::WipeOpen, std::string(kSurfacePanel), now, {}, {}, {}});
          trace.clear();
          return;
        }
      }
    } else if (in_corner(now)) {
      for (std::size_t i = down; i < n; ++i) {
        if (now.y - trace[i]->y >= cfg_.wipe_rise) {
          emit({GestureKind::WipeClose, std::string(kSurfacePanel), now, {}, {}, {}});
          trace.clear();
          return;
        }
      }
    }
  }

  const GestureInput& in_;
  const PrototypeDoc& doc_;
  const GestureConfig& cfg_;
  const DisplayQuad* quad_ = nullptr;
  std::optional<Vec2> primary_, secondary_, primary_uv_;
  GestureStep out_;
};

}  // namespace

GestureStep step(const GestureState& state, const GestureInput& input, const PrototypeDoc& doc,
                 const GestureConfig& config) {
  return Stepper(state, input, doc, config).run();
}

}  // namespace vip

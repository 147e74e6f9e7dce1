#include <gtest/gtest.h>

#include <random>

#include "support/gesture_fuzz.hpp"
#include "vip/error.hpp"
#include "vip/gesture.hpp"

namespace vip {
namespace {

using test::rect_display;

TEST(PanelCoords, AxisAlignedRect) {
  const DisplayQuad q = rect_display(0, 0, 100, 50);
  const Vec2 c = to_panel_coords({50, 25}, q);
  EXPECT_NEAR(c.x, 0.5, 1e-12);
  EXPECT_NEAR(c.y, 0.5, 1e-12);
  const Vec2 tl = to_panel_coords({0, 0}, q);
  EXPECT_NEAR(tl.x, 0.0, 1e-12);
  EXPECT_NEAR(tl.y, 0.0, 1e-12);
  const Vec2 out = to_panel_coords({150, -25}, q);
  EXPECT_NEAR(out.x, 1.5, 1e-12);
  EXPECT_NEAR(out.y, -0.5, 1e-12);
}

TEST(PanelCoords, RoundTripsOnRandomConvexQuads) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jitter(-25, 25), unit(0, 1), angle(0, 6.283185307179586);
  int checked = 0;
  while (checked < 300) {
    const double a = angle(rng), r = 60;
    std::array<Vec2, 4> pts;
    for (int i = 0; i < 4; ++i) {
      const double t = a + i * 1.5707963267948966;
      pts[i] = Vec2{160 + r * std::cos(t) + jitter(rng), 120 + r * std::sin(t) + jitter(rng)};
    }
    const DisplayQuad q = canonical_quad(pts);
    if (!q.simple()) continue;
    for (int k = 0; k < 5; ++k) {
      const Vec2 uv{unit(rng), unit(rng)};
      const Vec2 p = from_panel_coords(uv, q);
      const Vec2 back = to_panel_coords(p, q);
      ASSERT_NEAR(back.x, uv.x, 1e-9);
      ASSERT_NEAR(back.y, uv.y, 1e-9);
      ASSERT_LT(distance(from_panel_coords(back, q), p), 1e-6);
    }
    ++checked;
  }
}

TEST(PanelCoords, OutsidePointsStayOutside) {
  const DisplayQuad q = canonical_quad({Vec2{10, 10}, Vec2{110, 20}, Vec2{100, 90}, Vec2{5, 80}});
  for (Vec2 p : {Vec2{0, 0}, Vec2{200, 50}, Vec2{50, 120}, Vec2{50, -10}}) {
    const Vec2 uv = to_panel_coords(p, q);
    EXPECT_FALSE(uv.x >= 0 && uv.x <= 1 && uv.y >= 0 && uv.y <= 1) << p.x << "," << p.y;
  }
}

TEST(PanelCoords, DegenerateQuadThrows) {
  const DisplayQuad flat{{Vec2{0, 0}, Vec2{10, 0}, Vec2{20, 0}, Vec2{30, 0}}, 1.0};
  try {
    to_panel_coords({1, 1}, flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateQuad);
  }
  const DisplayQuad bow{{Vec2{0, 0}, Vec2{10, 10}, Vec2{10, 0}, Vec2{0, 10}}, 1.0};
  EXPECT_THROW(to_panel_coords({1, 1}, bow), Error);
}

// Panel at frame (60,20)-(300,200); palette slots on the left.
class GestureFixture : public ::testing::Test {
 protected:
  DisplayQuad quad = rect_display(60, 20, 300, 200);
  GestureConfig cfg;
  PrototypeDoc doc = test::workbench_doc();
  GestureState state;

  Vec2 frame_at(Vec2 uv) const { return from_panel_coords(uv, quad); }
  Vec2 slot(std::string_view id) const {
    for (std::size_t i = 0; i < doc.palette.size(); ++i) {
      if (doc.palette[i].id == id) return palette_slot_center(cfg, doc, i);
    }
    throw std::logic_error("no slot");
  }

  std::vector<GestureEvent> tick(std::optional<Vec2> index, bool tap = false,
                                 std::optional<Vec2> thumb = std::nullopt) {
    GestureInput in;
    in.quad = quad;
    in.markers.push_back({"index", index, {}, 0});
    in.markers.push_back({"thumb", thumb, {}, 0});
    if (tap && index) in.tap = TapEvent{0, *index, "index"};
    GestureStep s = step(state, in, doc, cfg);
    state = s.state;
    for (const GestureEvent& ev : s.events) {
      ApplyResult r = apply_gesture(doc, ev);
      doc = evaluate_graph(r.doc, r.effects);
    }
    return s.events;
  }

  static std::vector<GestureKind> kinds(const std::vector<GestureEvent>& evs, bool drop_scan = true) {
    std::vector<GestureKind> k;
    for (const auto& e : evs) {
      if (!drop_scan || e.kind != GestureKind::Scan) k.push_back(e.kind);
    }
    return k;
  }
};

TEST_F(GestureFixture, TapOnPaletteSelects) {
  const auto evs = tick(slot("button"), true);
  ASSERT_EQ(kinds(evs), (std::vector{GestureKind::Select}));
  EXPECT_EQ(evs[0].target, "button");
  EXPECT_EQ(state.clipboard, "button");
}

TEST_F(GestureFixture, TapOnPanelPlacesClipboard) {
  tick(slot("button"), true);
  const auto evs = tick(frame_at({0.3, 0.4}), true);
  ASSERT_EQ(kinds(evs), (std::vector{GestureKind::Place}));
  EXPECT_EQ(evs[0].target, "button");
  EXPECT_EQ(evs[0].template_id, "button");
  EXPECT_NEAR(evs[0].position->x, 0.3, 1e-9);
  EXPECT_NEAR(evs[0].position->y, 0.4, 1e-9);
  EXPECT_FALSE(state.clipboard);
  ASSERT_NE(doc.find("button"), nullptr);
  EXPECT_NEAR(doc.find("button")->bounds.u, 0.3, 1e-9);
}

TEST_F(GestureFixture, LockThenClickInRunMode) {
  tick(slot("button"), true);
  tick(frame_at({0.3, 0.4}), true);
  ASSERT_EQ(kinds(tick(slot("lock"), true)), (std::vector{GestureKind::Lock}));
  EXPECT_TRUE(doc.find("button")->locked);
  doc.mode = Mode::Run;
  const auto evs = tick(frame_at({0.35, 0.45}), true);
  ASSERT_EQ(kinds(evs), (std::vector{GestureKind::Click}));
  EXPECT_EQ(evs[0].target, "button");
  // Locked elements also click in edit mode.
  doc.mode = Mode::Edit;
  EXPECT_EQ(kinds(tick(frame_at({0.36, 0.45}), true)), (std::vector{GestureKind::Click}));
}

TEST_F(GestureFixture, LockWithoutSelectionDoesNothing) {
  EXPECT_TRUE(tick(slot("lock"), true).empty());
}

TEST_F(GestureFixture, RunModeIgnoresPaletteAndUnlockedElements) {
  tick(slot("button"), true);
  tick(frame_at({0.3, 0.4}), true);
  doc.mode = Mode::Run;
  EXPECT_TRUE(kinds(tick(slot("slider"), true)).empty());
  EXPECT_TRUE(kinds(tick(frame_at({0.35, 0.45}), true)).empty());
}

TEST_F(GestureFixture, TapMoveTapDrags) {
  tick(slot("button"), true);
  tick(frame_at({0.3, 0.4}), true);
  auto evs = tick(frame_at({0.35, 0.45}), true);
  ASSERT_EQ(kinds(evs), (std::vector{GestureKind::DragMove}));
  EXPECT_NEAR(evs[0].offset->x, 0.05, 1e-9);
  evs = tick(frame_at({0.55, 0.65}));
  ASSERT_EQ(kinds(evs, false), (std::vector{GestureKind::DragMove}));
  EXPECT_NEAR(doc.find("button")->bounds.u, 0.5, 1e-9);
  evs = tick(frame_at({0.56, 0.65}), true);
  ASSERT_EQ(kinds(evs), (std::vector{GestureKind::DragEnd}));
  EXPECT_FALSE(state.drag);
  EXPECT_NEAR(doc.find("button")->bounds.u, 0.51, 1e-9);
  EXPECT_EQ(kinds(tick(slot("lock"), true)), (std::vector{GestureKind::Lock}));
}

TEST_F(GestureFixture, MotionlessMarkersEmitNothing) {
  tick(slot("button"), true);
  tick(frame_at({0.3, 0.4}), true);
  const Vec2 rest = frame_at({0.7, 0.7});
  for (int i = 0; i < 100; ++i) {
    const auto evs = tick(rest);
    if (i > 0) {
      EXPECT_TRUE(evs.empty()) << i;
    }
  }
}

TEST_F(GestureFixture, ScanOnMotionOnly) {
  tick(frame_at({0.5, 0.5}));
  auto evs = tick(frame_at({0.55, 0.5}));
  ASSERT_EQ(kinds(evs, false), (std::vector{GestureKind::Scan}));
  EXPECT_EQ(evs[0].target, "panel");
  EXPECT_NEAR(evs[0].position->x, 0.55, 1e-9);
  evs = tick(slot("slider"));
  ASSERT_EQ(kinds(evs, false), (std::vector{GestureKind::Scan}));
  EXPECT_EQ(evs[0].target, "palette");
}

TEST_F(GestureFixture, PinchResizesAndEnds) {
  tick(slot("button"), true);
  tick(frame_at({0.3, 0.4}), true);
  PanelElement& b = *doc.find("button");
  b.bounds = {0.2, 0.2, 0.6, 0.6};  // 144 x 108 px
  // Markers 100 px apart inside the element.
  const Vec2 a{130, 110};
  auto evs = tick(a, false, a + Vec2{100, 0});
  ASSERT_EQ(kinds(evs), (std::vector{GestureKind::ResizeStart}));
  evs = tick(a, false, a + Vec2{60, 0});
  ASSERT_EQ(kinds(evs), (std::vector{GestureKind::ResizeMove}));
  EXPECT_NEAR(*evs[0].scale, 0.6, 1e-12);
  EXPECT_NEAR(doc.find("button")->bounds.w, 0.36, 1e-9);
  EXPECT_NEAR(doc.find("button")->bounds.center().x, 0.5, 1e-9);
  evs = tick(a, false, a + Vec2{101, 0});
  ASSERT_EQ(kinds(evs), (std::vector{GestureKind::ResizeEnd}));
  // Not re-armed until the markers leave the element.
  EXPECT_TRUE(kinds(tick(a, false, a + Vec2{40, 0})).empty());
}

TEST_F(GestureFixture, PinchCancelsSilentlyWhenThumbVanishes) {
  tick(slot("button"), true);
  tick(frame_at({0.3, 0.4}), true);
  doc.find("button")->bounds = {0.2, 0.2, 0.6, 0.6};
  const Vec2 a{130, 110};
  tick(a, false, a + Vec2{100, 0});
  EXPECT_TRUE(kinds(tick(a, false, std::nullopt)).empty());
  EXPECT_FALSE(state.pinch);
}

TEST_F(GestureFixture, WipeOpensOnceAndClosesMirrored) {
  std::vector<GestureKind> seen;
  for (int i = 0; i < 10; ++i) {
    for (auto k : kinds(tick(frame_at({0.08, 0.95 - 0.06 * i})))) seen.push_back(k);
  }
  EXPECT_EQ(seen, (std::vector{GestureKind::WipeOpen}));
  EXPECT_TRUE(doc.inspector);
  seen.clear();
  for (int i = 0; i < 10; ++i) {
    for (auto k : kinds(tick(frame_at({0.08, 0.40 + 0.06 * i})))) seen.push_back(k);
  }
  EXPECT_EQ(seen, (std::vector{GestureKind::WipeClose}));
  EXPECT_FALSE(doc.inspector);
}

TEST_F(GestureFixture, WipeNeedsCornerStartAndRise) {
  std::vector<GestureKind> seen;
  // Starts outside the corner.
  for (int i = 0; i < 10; ++i) {
    for (auto k : kinds(tick(frame_at({0.3, 0.95 - 0.06 * i})))) seen.push_back(k);
  }
  tick(std::nullopt);
  // Rise too short.
  for (int i = 0; i < 10; ++i) {
    for (auto k : kinds(tick(frame_at({0.05, 0.95 - 0.03 * i})))) seen.push_back(k);
  }
  tick(std::nullopt);
  // Too slow: 0.45 rise over 30 frames.
  for (int i = 0; i < 30; ++i) {
    for (auto k : kinds(tick(frame_at({0.05, 0.95 - 0.015 * i})))) seen.push_back(k);
  }
  EXPECT_TRUE(seen.empty());
}

TEST(WipeProperty, TranslationInvariantInXWithinCorner) {
  for (double x0 : {0.0, 0.03, 0.07, 0.11, 0.15}) {
    GestureConfig cfg;
    PrototypeDoc doc = test::workbench_doc();
    GestureState st;
    const DisplayQuad quad = rect_display(60, 20, 300, 200);
    int opens = 0, first_tick = -1;
    for (int i = 0; i < 12; ++i) {
      GestureInput in;
      in.quad = quad;
      in.markers.push_back({"index", from_panel_coords({x0, 0.97 - 0.052 * i}, quad), {}, i});
      GestureStep s = step(st, in, doc, cfg);
      st = s.state;
      for (const auto& e : s.events) {
        if (e.kind == GestureKind::WipeOpen) {
          ++opens;
          if (first_tick < 0) first_tick = i;
        }
      }
    }
    EXPECT_EQ(opens, 1) << x0;
    EXPECT_EQ(first_tick, 8) << x0;  // rise 0.416 at tick 8, 0.364 at tick 7
  }
}

TEST(GestureProperties, SafetyRulesHoldUnderFuzz) {
  std::size_t events = 0;
  std::map<GestureKind, std::size_t> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto out = test::fuzz_gesture_session(seed, 150);
    events += out.events;
    for (const auto& [k, n] : out.by_kind) seen[k] += n;
    ASSERT_TRUE(out.violations.empty()) << "seed " << seed << ": " << out.violations.front();
  }
  EXPECT_GT(events, 1000u);
  for (GestureKind k : {GestureKind::Select, GestureKind::Place, GestureKind::Lock,
                        GestureKind::Click, GestureKind::DragMove, GestureKind::ResizeStart,
                        GestureKind::ResizeMove}) {
    EXPECT_GT(seen[k], 10u) << to_string(k);
  }
}

TEST(GestureProperties, ReplayIsDeterministic) {
  const auto a = test::fuzz_gesture_session(42, 500);
  const auto b = test::fuzz_gesture_session(42, 500);
  EXPECT_EQ(a.log, b.log);
  EXPECT_FALSE(a.log.empty());
}

TEST(GestureEventJson, RoundTrips) {
  const GestureEvent ev{GestureKind::DragMove, "b", Vec2{0.25, 0.5}, {}, {}, Vec2{0.01, 0.02}};
  EXPECT_EQ(gesture_event_from_json(nlohmann::json::parse(to_json(ev).dump())), ev);
  const GestureEvent rs{GestureKind::ResizeMove, "b", {}, 0.6, {}, {}};
  EXPECT_EQ(gesture_event_from_json(nlohmann::json::parse(to_json(rs).dump())), rs);
  EXPECT_THROW(gesture_event_from_json(nlohmann::json{{"kind", "Poke"}, {"target", "x"}}), Error);
}

}  // namespace
}  // namespace vip

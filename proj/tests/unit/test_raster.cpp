#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "support/oracles.hpp"
#include "support/test_support.hpp"
#include "vip/error.hpp"
#include "vip/raster.hpp"

namespace vip {
namespace {

using test::oracle_hsv;
using test::oracle_in_range;

TEST(RgbToHsv, PureRed) {
  const HsvColor c = rgb_to_hsv({255, 0, 0});
  EXPECT_DOUBLE_EQ(c.h, 0.0);
  EXPECT_DOUBLE_EQ(c.s, 1.0);
  EXPECT_DOUBLE_EQ(c.v, 1.0);
}

TEST(RgbToHsv, AchromaticHasZeroHue) {
  const HsvColor c = rgb_to_hsv({128, 128, 128});
  EXPECT_EQ(c.h, 0.0);
  EXPECT_EQ(c.s, 0.0);
  EXPECT_NEAR(c.v, 0.502, 1e-3);
  EXPECT_EQ(rgb_to_hsv({0, 0, 0}).h, 0.0);
  EXPECT_EQ(rgb_to_hsv({0, 0, 0}).s, 0.0);
}

TEST(RgbToHsv, AzureMatchesHandEvaluatedHexcone) {
  // 60 * (4 + (R - G) / (max - min)) with R=0, G=128, max-min=255.
  const double expected = 60.0 * (4.0 + (0.0 - 128.0) / 255.0);
  const HsvColor c = rgb_to_hsv({0, 128, 255});
  EXPECT_NEAR(c.h, 209.88, 0.005);
  EXPECT_NEAR(c.h, expected, 1e-12);
  EXPECT_DOUBLE_EQ(c.s, 1.0);
  EXPECT_DOUBLE_EQ(c.v, 1.0);
}

TEST(RgbToHsv, AgreesWithOracleOnAllPrimaryCubeSamples) {
  for (int r = 0; r < 256; r += 15) {
    for (int g = 0; g < 256; g += 15) {
      for (int b = 0; b < 256; b += 15) {
        const Rgb px{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                     static_cast<std::uint8_t>(b)};
        const HsvColor a = rgb_to_hsv(px);
        const HsvColor o = oracle_hsv(px);
        ASSERT_NEAR(a.h, o.h, 1e-9) << r << "," << g << "," << b;
        ASSERT_NEAR(a.s, o.s, 1e-12);
        ASSERT_NEAR(a.v, o.v, 1e-12);
        ASSERT_GE(a.h, 0.0);
        ASSERT_LT(a.h, 360.0);
      }
    }
  }
}

// Finds an 8-bit color whose conversion lands on (30, 0.8, 0.9) closely.
Rgb color_near_h30() {
  // v = 0.9 -> max ~ 230; s = 0.8 -> min ~ 46; h = 30 -> g = min + (max-min)/2.
  return {230, 138, 46};
}

TEST(Segment, UniformInRangeFrameIsAllOn) {
  const Rgb px = color_near_h30();
  const HsvColor c = rgb_to_hsv(px);
  ASSERT_NEAR(c.h, 30.0, 0.5);
  ASSERT_NEAR(c.s, 0.8, 0.01);
  ASSERT_NEAR(c.v, 0.9, 0.01);
  const Frame f(9, 7, px);
  const BinaryMask m = segment(f, {20, 40, 0.5, 1, 0.5, 1});
  EXPECT_EQ(m.count_on(), 63u);
  EXPECT_EQ(m.width(), 9);
  EXPECT_EQ(m.height(), 7);
}

TEST(Segment, OutOfHueRangeIsAllOff) {
  const Frame f(9, 7, color_near_h30());
  EXPECT_EQ(segment(f, {100, 120, 0.5, 1, 0.5, 1}).count_on(), 0u);
}

TEST(Segment, WrappingHueCoversRed) {
  Frame f(3, 1);
  f.at(0, 0) = {250, 10, 30};   // h ~ 355
  f.at(1, 0) = {250, 30, 10};   // h ~ 5
  f.at(2, 0) = {10, 250, 30};   // green
  const BinaryMask m = segment(f, {340, 20, 0.3, 1, 0.3, 1});
  EXPECT_TRUE(m.on(0, 0));
  EXPECT_TRUE(m.on(1, 0));
  EXPECT_FALSE(m.on(2, 0));
}

TEST(Segment, MatchesPerPixelOracleOnMixedFrame) {
  std::mt19937_64 rng(16);
  const Frame f = test::random_frame(rng, 16, 16);
  const HsvRange range{35.5, 190.25, 0.2, 0.9, 0.15, 0.95};
  const BinaryMask m = segment(f, range);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      EXPECT_EQ(m.on(x, y), oracle_in_range(oracle_hsv(f.at(x, y)), range)) << x << "," << y;
    }
  }
}

TEST(Segment, OutputIsStrictlyBinaryUnderFuzz) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> deg(0.0, 360.0), unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Frame f = test::random_frame(rng, 13, 11);
    double s0 = unit(rng), s1 = unit(rng), v0 = unit(rng), v1 = unit(rng);
    const HsvRange r{deg(rng), deg(rng), std::min(s0, s1), std::max(s0, s1), std::min(v0, v1),
                     std::max(v0, v1)};
    const BinaryMask m = segment(f, r);
    for (std::uint8_t v : m.values()) ASSERT_TRUE(v == 0 || v == 255);
  }
}

TEST(Segment, FullRangeIsAllOnAndEmptySaturationIsAllOff) {
  std::mt19937_64 rng(5);
  const Frame f = test::random_frame(rng, 17, 9);
  EXPECT_EQ(segment(f, {0, 360, 0, 1, 0, 1}).count_on(), f.pixels().size());
  // s in [0.6, 0.4] is empty.
  EXPECT_EQ(segment(f, {0, 360, 0.6, 0.4, 0, 1}).count_on(), 0u);
}

TEST(ConnectedComponents, EmptyMask) {
  EXPECT_TRUE(connected_components(BinaryMask(8, 8)).empty());
}

TEST(ConnectedComponents, TwoBlocks) {
  BinaryMask m(12, 6);
  for (int y = 1; y < 4; ++y) {
    for (int x = 1; x < 4; ++x) m.at(x, y) = 255;
    for (int x = 7; x < 10; ++x) m.at(x, y) = 255;
  }
  const auto comps = connected_components(m);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].area, 9u);
  EXPECT_EQ(comps[1].area, 9u);
  EXPECT_EQ(comps[0].bbox.x0, 1);
  EXPECT_EQ(comps[1].bbox.x0, 7);
}

TEST(ConnectedComponents, DiagonalTouchJoinsUnder8Connectivity) {
  BinaryMask m(4, 4);
  m.at(0, 0) = 255;
  m.at(1, 1) = 255;
  m.at(3, 3) = 255;
  const auto comps = connected_components(m);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].area, 2u);
}

// Naive recursive-style flood fill: repeatedly sweep the mask assigning the
// minimum neighbour label until nothing changes.
std::vector<int> oracle_labels(const BinaryMask& m) {
  const int w = m.width(), h = m.height();
  std::vector<int> lab(w * h, -1);
  for (int i = 0; i < w * h; ++i) {
    if (m.values()[i]) lab[i] = i;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        int& l = lab[y * w + x];
        if (l < 0) continue;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int o = lab[ny * w + nx];
            if (o >= 0 && o < l) {
              l = o;
              changed = true;
            }
          }
        }
      }
    }
  }
  return lab;
}

TEST(ConnectedComponents, MatchesFloodFillOraclePartition) {
  std::mt19937_64 rng(32);
  std::bernoulli_distribution on(0.45);
  for (int trial = 0; trial < 10; ++trial) {
    BinaryMask m(32, 32);
    for (auto& v : m.values()) v = on(rng) ? 255 : 0;
    const auto comps = connected_components(m);
    const auto lab = oracle_labels(m);

    std::size_t total = 0;
    std::set<int> seen_oracle_labels;
    std::vector<int> owner(32 * 32, -1);
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (c > 0) {
        ASSERT_GE(comps[c - 1].area, comps[c].area);
      }
      ASSERT_EQ(comps[c].area, comps[c].pixels.size());
      const int oracle_label = lab[comps[c].pixels[0].y * 32 + comps[c].pixels[0].x];
      ASSERT_TRUE(seen_oracle_labels.insert(oracle_label).second);
      for (const PixelCoord& p : comps[c].pixels) {
        ASSERT_TRUE(m.on(p.x, p.y));
        ASSERT_EQ(owner[p.y * 32 + p.x], -1) << "components overlap";
        owner[p.y * 32 + p.x] = static_cast<int>(c);
        ASSERT_EQ(lab[p.y * 32 + p.x], oracle_label);
      }
      total += comps[c].area;
    }
    EXPECT_EQ(total, m.count_on());
    std::set<int> all_oracle;
    for (int l : lab) {
      if (l >= 0) all_oracle.insert(l);
    }
    EXPECT_EQ(all_oracle.size(), comps.size());
  }
}

// Brute force: the optimum shares a direction with some pair of input points.
double oracle_min_area(std::span<const Vec2> pts) {
  double best = 1e300;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const Vec2 d = pts[j] - pts[i];
      const double len = norm(d);
      if (len < 1e-12) continue;
      const Vec2 u = (1.0 / len) * d;
      const Vec2 n{-u.y, u.x};
      double lo_u = 1e300, hi_u = -1e300, lo_n = 1e300, hi_n = -1e300;
      for (const Vec2& p : pts) {
        lo_u = std::min(lo_u, dot(p, u));
        hi_u = std::max(hi_u, dot(p, u));
        lo_n = std::min(lo_n, dot(p, n));
        hi_n = std::max(hi_n, dot(p, n));
      }
      best = std::min(best, (hi_u - lo_u) * (hi_n - lo_n));
    }
  }
  return best;
}

TEST(MinAreaRect, AxisAlignedSquare) {
  const std::vector<Vec2> pts{{10, 10}, {12, 10}, {12, 12}, {10, 12}};
  const OrientedRect r = min_area_rect(pts);
  EXPECT_NEAR(r.center.x, 11.0, 1e-12);
  EXPECT_NEAR(r.center.y, 11.0, 1e-12);
  EXPECT_NEAR(r.width, 2.0, 1e-12);
  EXPECT_NEAR(r.height, 2.0, 1e-12);
  EXPECT_NEAR(r.angle, 0.0, 1e-9);
}

TEST(MinAreaRect, SinglePointIsDegenerate) {
  const std::vector<Vec2> pts{{5, 7}};
  const OrientedRect r = min_area_rect(pts);
  EXPECT_EQ(r.center, (Vec2{5, 7}));
  EXPECT_EQ(r.width, 0.0);
  EXPECT_EQ(r.height, 0.0);
}

TEST(MinAreaRect, CollinearPointsGiveZeroHeight) {
  const std::vector<Vec2> pts{{0, 0}, {1, 1}, {3, 3}};
  const OrientedRect r = min_area_rect(pts);
  EXPECT_NEAR(r.area(), 0.0, 1e-12);
  EXPECT_NEAR(r.center.x, 1.5, 1e-12);
  EXPECT_NEAR(std::max(r.width, r.height), 3.0 * std::sqrt(2.0), 1e-12);
}

TEST(MinAreaRect, DiamondMatchesBruteForce) {
  const std::vector<Vec2> pts{{0, 2}, {2, 0}, {4, 2}, {2, 4}};
  const OrientedRect r = min_area_rect(pts);
  EXPECT_NEAR(oracle_min_area(pts), 8.0, 1e-12);
  EXPECT_NEAR(r.area(), 8.0, 1e-9);
  EXPECT_NEAR(r.center.x, 2.0, 1e-12);
  EXPECT_NEAR(r.center.y, 2.0, 1e-12);
  EXPECT_NEAR(r.width, 2.0 * std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(r.height, 2.0 * std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(r.angle, 45.0, 1e-9);
}

TEST(MinAreaRect, EmptyInputThrows) {
  try {
    min_area_rect(std::span<const Vec2>{});
    FAIL() << "expected EmptyPointSet";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyPointSet);
  }
}

TEST(MinAreaRect, RandomCloudsMatchBruteForceAndContainAllPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);
  std::uniform_int_distribution<int> count(3, 24);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> pts(count(rng));
    for (Vec2& p : pts) p = {coord(rng), coord(rng)};
    const OrientedRect r = min_area_rect(pts);
    ASSERT_NEAR(r.area(), oracle_min_area(pts), 1e-7 * std::max(1.0, r.area()));
    ASSERT_GE(r.angle, 0.0);
    ASSERT_LT(r.angle, 90.0);
    double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
    for (const Vec2& p : pts) {
      ASSERT_TRUE(r.contains(p, 1e-6));
      minx = std::min(minx, p.x);
      maxx = std::max(maxx, p.x);
      miny = std::min(miny, p.y);
      maxy = std::max(maxy, p.y);
    }
    ASSERT_LE(r.area(), (maxx - minx) * (maxy - miny) + 1e-9);
  }
}

TEST(MinAreaRect, TranslationEquivariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(0.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> pts(12);
    for (Vec2& p : pts) p = {coord(rng), coord(rng)};
    const Vec2 shift{coord(rng) - 25.0, coord(rng) - 25.0};
    std::vector<Vec2> moved = pts;
    for (Vec2& p : moved) p = p + shift;
    const OrientedRect a = min_area_rect(pts);
    const OrientedRect b = min_area_rect(moved);
    EXPECT_NEAR(b.center.x, a.center.x + shift.x, 1e-9);
    EXPECT_NEAR(b.center.y, a.center.y + shift.y, 1e-9);
    EXPECT_NEAR(b.width, a.width, 1e-9);
    EXPECT_NEAR(b.height, a.height, 1e-9);
    EXPECT_NEAR(b.angle, a.angle, 1e-7);
  }
}

TEST(LocateMarker, IgnoresBlobsBelowMinimumArea) {
  BinaryMask m(20, 20);
  for (int y = 2; y < 6; ++y) {
    for (int x = 2; x < 6; ++x) m.at(x, y) = 255;  // 16 px
  }
  EXPECT_FALSE(locate_marker(m, 25).has_value());
  const auto r = locate_marker(m, 10);
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(r->center.x, 4.0, 1e-12);
  EXPECT_NEAR(r->center.y, 4.0, 1e-12);
}

TEST(LocateMarker, LargestComponentWins) {
  BinaryMask m(40, 20);
  for (int y = 2; y < 8; ++y) {
    for (int x = 2; x < 8; ++x) m.at(x, y) = 255;      // 36 px
    for (int x = 20; x < 30; ++x) m.at(x, y) = 255;    // 60 px
  }
  const auto r = locate_marker(m, 25);
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(r->center.x, 25.0, 1e-12);
  EXPECT_NEAR(r->center.y, 5.0, 1e-12);
}

TEST(LocateMarker, EllipseCentresWithinOnePixel) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(20.0, 108.0), axis(4.0, 12.0), ang(0.0, 180.0);
  for (int i = 0; i < 100; ++i) {
    Frame f(128, 128, test::kBackgroundGray);
    const Vec2 c{pos(rng), pos(rng)};
    test::paint_ellipse(f, c, axis(rng), axis(rng), ang(rng), test::kMarkerRed);
    const auto r = locate_marker(segment(f, test::kRedRange));
    ASSERT_TRUE(r.has_value()) << i;
    EXPECT_LE(distance(r->center, c), 1.0) << i;
  }
}

TEST(LocateMarker, RotatingSquareAngleWithinOneDegree) {
  for (double truth = 0.0; truth < 90.0; truth += 7.5) {
    Frame f(128, 128, test::kBackgroundGray);
    test::paint_rotated_rect(f, {64.3, 63.8}, 56, 56, truth, test::kMarkerRed);
    const auto r = locate_marker(segment(f, test::kRedRange));
    ASSERT_TRUE(r.has_value());
    const double err = std::abs(r->angle - truth);
    EXPECT_LE(std::min(err, 90.0 - err), 1.0) << truth;
  }
}

}  // namespace
}  // namespace vip

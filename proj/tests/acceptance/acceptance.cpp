// Release checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/atm_golden.hpp"
#include "support/doc_fuzz.hpp"
#include "support/gesture_fuzz.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"
#include "vip/audio.hpp"
#include "vip/edges.hpp"
#include "vip/image_io.hpp"
#include "vip/panel.hpp"
#include "vip/pipeline.hpp"
#include "vip/raster.hpp"
#include "vip/renderer.hpp"
#include "vip/scenario.hpp"

namespace vip {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

// Collects the first failure of a criterion; later checks still run so the
// detail line reports what was measured.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += ", ";
    notes_ += s;
  }
  bool ok() const { return failure_.empty(); }
  std::string detail() const { return ok() ? notes_ : failure_ + (notes_.empty() ? "" : "; " + notes_); }

 private:
  std::string failure_;
  std::string notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void segmentation(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> deg(0.0, 360.0), unit(0.0, 1.0);
  std::vector<HsvRange> ranges;
  for (int i = 0; i < 20; ++i) {
    double s0 = unit(rng), s1 = unit(rng), v0 = unit(rng), v1 = unit(rng);
    double h0 = deg(rng), h1 = deg(rng);
    // Half of them wrap through 0.
    if ((i % 2 == 0) != (h0 > h1)) std::swap(h0, h1);
    ranges.push_back({h0, h1, std::min(s0, s1), std::max(s0, s1), std::min(v0, v1),
                      std::max(v0, v1)});
  }
  std::size_t mismatched = 0, wrapping = 0;
  for (const HsvRange& r : ranges) wrapping += r.hue_min > r.hue_max;
  for (int f = 0; f < 50; ++f) {
    const Frame frame = test::random_frame(rng, 32, 32);
    for (const HsvRange& r : ranges) {
      const BinaryMask m = segment(frame, r);
      for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
          mismatched += m.on(x, y) != test::oracle_in_range(test::oracle_hsv(frame.at(x, y)), r);
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  c.expect(wrapping > 0, "no wrapping range generated");
  c.expect(mismatched == 0, std::to_string(mismatched) + " mismatched pixels");
  c.expect(secs < 5.0, "took " + fmt("%.2f", secs) + " s");
  c.note("1000 frame/range pairs, " + std::to_string(wrapping) + " wrapping ranges");
}

void marker_localization(Check& c) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> pos(20.0, 108.0), axis(4.0, 12.0), ang(0.0, 180.0);
  double worst_center = 0.0;
  for (int i = 0; i < 100; ++i) {
    Frame f(128, 128, test::kBackgroundGray);
    const Vec2 center{pos(rng), pos(rng)};
    test::paint_ellipse(f, center, axis(rng), axis(rng), ang(rng), test::kMarkerRed);
    const auto r = locate_marker(segment(f, test::kRedRange));
    if (!r) {
      c.expect(false, "ellipse " + std::to_string(i) + " not found");
      continue;
    }
    worst_center = std::max(worst_center, distance(r->center, center));
  }
  c.expect(worst_center <= 1.0, "center error " + fmt("%.3f", worst_center) + " px");

  // A square turning through a quarter revolution; the min-area rect angle
  // is reported in [0, 90).
  double worst_angle = 0.0;
  for (double truth = 0.0; truth < 90.0; truth += 2.5) {
    Frame f(128, 128, test::kBackgroundGray);
    test::paint_rotated_rect(f, {64.3, 63.8}, 56, 56, truth, test::kMarkerRed);
    const auto r = locate_marker(segment(f, test::kRedRange));
    if (!r) {
      c.expect(false, "diamond not found at " + fmt("%.1f", truth));
      continue;
    }
    double err = std::abs(r->angle - truth);
    err = std::min(err, 90.0 - err);
    worst_angle = std::max(worst_angle, err);
  }
  c.expect(worst_angle <= 1.0, "angle error " + fmt("%.3f", worst_angle) + " deg");
  c.note("max center error " + fmt("%.3f", worst_center) + " px");
  c.note("max angle error " + fmt("%.3f", worst_angle) + " deg");
}

void canny_contract(Check& c) {
  // (a) default ratio
  const CannyParams defaults;
  c.expect(defaults.ratio == 2.5, "default ratio is not 2.5");
  c.expect(defaults.t_low() == defaults.t_high / 2.5, "t_low != t_high / 2.5");

  // (b) raising the high threshold never adds an edge pixel
  std::mt19937_64 rng(303);
  std::size_t violations = 0;
  for (int i = 0; i < 20; ++i) {
    const GrayImage img = test::random_gray(rng, 32, 32);
    BinaryMask prev = canny(img, CannyParams{1.0, 0.1, 2.5});
    for (double t : {0.2, 0.35, 0.5, 0.8, 1.2, 2.0}) {
      const BinaryMask cur = canny(img, CannyParams{1.0, t, 2.5});
      for (std::size_t k = 0; k < cur.values().size(); ++k) {
        violations += cur.values()[k] && !prev.values()[k];
      }
      prev = cur;
    }
  }
  c.expect(violations == 0, std::to_string(violations) + " pixels appeared at a higher threshold");

  // (c) 8x8 square in a 16x16 frame
  GrayImage square(16, 16, 0.0f);
  for (int y = 4; y < 12; ++y) {
    for (int x = 4; x < 12; ++x) square.at(x, y) = 1.0f;
  }
  const BinaryMask loop = canny(square, defaults);
  c.expect(connected_components(loop).size() == 1, "square edges are not one component");
  c.expect(test::encloses_center(loop, {8, 8}), "square loop is open");
  c.expect(!test::has_filled_2x2(loop), "square loop is thicker than one pixel");

  // (d) filled random convex quads through the full detector
  std::uniform_real_distribution<double> jitter(-14.0, 14.0), size(50.0, 90.0), shade(0.5, 0.9);
  double worst = 0.0;
  int found = 0;
  for (int i = 0; i < 20; ++i) {
    const double w = size(rng), h = size(rng);
    const double x0 = 64 - w / 2, y0 = 64 - h / 2;
    std::array<Vec2, 4> truth{Vec2{x0 + jitter(rng), y0 + jitter(rng)},
                              Vec2{x0 + w + jitter(rng), y0 + jitter(rng)},
                              Vec2{x0 + w + jitter(rng), y0 + h + jitter(rng)},
                              Vec2{x0 + jitter(rng), y0 + h + jitter(rng)}};
    const DisplayQuad tq{truth, 1.0};
    if (!tq.simple() || tq.signed_area() < 0.1 * 128 * 128) {
      --i;
      continue;
    }
    GrayImage img(128, 128, 0.1f);
    test::fill_convex_quad(img, truth, static_cast<float>(shade(rng)));
    const auto q = detect_display_quad(canny(img, defaults));
    if (!q) continue;
    ++found;
    worst = std::max(worst, test::quad_corner_error(q->corners, truth));
  }
  c.expect(found == 20, std::to_string(20 - found) + " quads not detected");
  c.expect(worst <= 2.0, "quad corner error " + fmt("%.3f", worst) + " px");
  c.note("max quad corner error " + fmt("%.3f", worst) + " px");
}

void audio(Check& c) {
  // 8 * f_high has to stay below Nyquist, hence 48 kHz and a 800-2000 Hz band.
  const double fs = 48000, fl = 800, fh = 2000, f0 = std::sqrt(fl * fh);
  const double g0 = test::steady_amplitude(band_pass(test::sine(f0, 1.0, fs, 1.0), fl, fh), f0);
  const double g8 =
      test::steady_amplitude(band_pass(test::sine(8 * fh, 1.0, fs, 1.0), fl, fh), 8 * fh);
  const double o0 = test::oracle_gain(f0, fl, fh, fs), o8 = test::oracle_gain(8 * fh, fl, fh, fs);
  c.expect(g0 >= 0.9 && g0 <= 1.1, "gain at f0 " + fmt("%.4f", g0));
  c.expect(g8 < 0.1, "gain at 8 f_high " + fmt("%.4f", g8));
  c.expect(std::abs(g0 - o0) <= 0.05 * o0, "f0 gain off the oracle");
  c.expect(std::abs(g8 - o8) <= 0.05 * o8, "8 f_high gain off the oracle");
  c.note("gain f0 " + fmt("%.4f", g0) + " (oracle " + fmt("%.4f", o0) + ")");
  c.note("gain 8fh " + fmt("%.4f", g8) + " (oracle " + fmt("%.4f", o8) + ")");

  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  AudioChunk whole{std::vector<double>(16000), 16000.0, 0.0};
  for (double& s : whole.samples) s = unit(rng);
  const AudioChunk reference = band_pass(whole, 800, 4000);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    BandPassFilter filter(800, 4000, 16000);
    std::uniform_int_distribution<std::size_t> len(0, 900);
    std::size_t pos = 0;
    while (pos < whole.samples.size()) {
      const std::size_t n = std::min(len(rng), whole.samples.size() - pos);
      const AudioChunk part{{whole.samples.begin() + pos, whole.samples.begin() + pos + n},
                            16000.0, 1000.0 * pos / 16000.0};
      const AudioChunk y = filter.process(part);
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(y.samples[i] - reference.samples[pos + i]));
      }
      pos += n;
    }
  }
  c.expect(worst <= 1e-12, "chunked output differs by " + fmt("%.3g", worst));

  std::size_t nonmonotone = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const AudioChunk s = test::fuzzed_stream(rng);
    std::size_t prev = SIZE_MAX;
    for (double thr = 0.0; thr <= 1.0; thr += 0.025) {
      ClickParams p;
      p.level_threshold = thr;
      const std::size_t n = detect_clicks(std::span(&s, 1), p).size();
      nonmonotone += n > prev;
      prev = n;
    }
  }
  c.expect(nonmonotone == 0, "click count rose with the threshold");

  // Two taps 30 ms apart inside the 150 ms debounce window.
  AudioChunk taps = test::silence(1.0);
  test::add_burst(taps, 4000, 5.0, 0.9);
  test::add_burst(taps, 4480, 5.0, 0.9);
  ClickParams p;
  BandPassFilter filter(p.f_low, p.f_high, taps.sample_rate);
  const AudioChunk filtered = filter.process(taps);
  const std::size_t clicks = detect_clicks(std::span(&filtered, 1), p).size();
  c.expect(clicks == 1, "debounce fixture gave " + std::to_string(clicks) + " clicks");
}

// A 500-tick recording: the ATM walk followed by a random wander with taps.
std::filesystem::path write_long_session(const std::filesystem::path& dir) {
  const auto session = scenario::write_atm_session(dir);
  const SessionConfig cfg = load_session_config(session);
  scenario::Script script = scenario::atm_script(cfg, scenario::atm_doc());
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> x(70, 290), y(30, 190);
  while (script.ticks().size() + 30 <= 500) {
    script.glide({x(rng), y(rng)}, 8);
    script.tap({x(rng), y(rng)}, 12, 10);
  }
  script.hold(script.ticks().back().primary, 500 - static_cast<int>(script.ticks().size()));
  const auto rec = scenario::record(cfg.scene, script, cfg.tick_ms, "index", "thumb",
                                    cfg.sample_rate);
  std::filesystem::remove_all(dir / "frames");
  scenario::write_recording(dir, rec);
  return session;
}

void gesture(Check& c) {
  test::TempDir dir("accept-long");
  const auto session = write_long_session(dir.path());
  const SessionEventLog a = run_session(load_session_config(session));
  const SessionEventLog b = run_session(load_session_config(session));
  std::size_t gestures = 0;
  for (const auto& r : a.records) gestures += r["gestures"].size();
  c.expect(a.records.size() == 500, "recording has " + std::to_string(a.records.size()) + " ticks");
  c.expect(gestures > 0, "recording produced no gestures");
  c.expect(a.to_jsonl() == b.to_jsonl(), "replayed logs differ");
  c.note(std::to_string(gestures) + " gestures in the 500-tick replay");

  std::size_t events = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto out = test::fuzz_gesture_session(seed, 120);
    events += out.events;
    if (!out.violations.empty()) {
      c.expect(false, "seed " + std::to_string(seed) + ": " + out.violations.front());
    }
  }
  c.note(std::to_string(events) + " fuzzed events checked");
}

void affine(Check& c) {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> coord(-500, 500), size(1, 800);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double w = size(rng), h = size(rng);
    const Vec2 tl{coord(rng), coord(rng)}, tr{coord(rng), coord(rng)}, bl{coord(rng), coord(rng)};
    if (std::abs(cross(tr - tl, bl - tl)) < 1.0) continue;
    const AffineTransform t = fit_affine(w, h, tl, tr, bl);
    worst = std::max({worst, distance(t.apply({0, 0}), tl), distance(t.apply({w, 0}), tr),
                      distance(t.apply({0, h}), bl)});
  }
  c.expect(worst <= 1e-9, "anchor error " + fmt("%.3g", worst));

  const AffineTransform tri = fit_affine(1, 1, {2, 1}, {4, 1}, {2, 5});
  const AffineTransform oracle =
      test::oracle_affine({Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}}, {Vec2{2, 1}, Vec2{4, 1}, Vec2{2, 5}});
  const double coeffs[][2] = {{tri.a, oracle.a}, {tri.b, oracle.b}, {tri.tx, oracle.tx},
                              {tri.c, oracle.c}, {tri.d, oracle.d}, {tri.ty, oracle.ty}};
  double tri_err = 0.0;
  for (const auto& [got, want] : coeffs) tri_err = std::max(tri_err, std::abs(got - want));
  c.expect(tri_err <= 1e-12, "triangle differs from the oracle by " + fmt("%.3g", tri_err));
  c.expect(std::abs(oracle.a - 2) + std::abs(oracle.d - 4) + std::abs(oracle.tx - 2) +
                   std::abs(oracle.ty - 1) + std::abs(oracle.b) + std::abs(oracle.c) <=
               1e-12,
           "oracle disagrees with (2,0,2;0,4,1)");

  const Frame src = test::random_frame(rng, 61, 47);
  const Frame copy = warp_into(src, AffineTransform{}, Frame(61, 47));
  c.expect(copy == src, "identity warp is not a copy");
  c.note("max anchor error " + fmt("%.3g", worst));
}

void atm(Check& c) {
  test::TempDir dir("accept-atm");
  const auto session = scenario::write_atm_session(dir.path());
  const auto t0 = Clock::now();
  const SessionEventLog log = run_session(load_session_config(session));
  const double secs = seconds_since(t0);
  const auto observed = test::atm_observed(log.records);
  c.expect(log.records.size() == test::kAtmTicks, "tick count " + std::to_string(log.records.size()));
  c.expect(observed == test::atm_golden(), "gesture log differs from the golden");
  const PanelElement* screen = log.final_doc.find("screen");
  c.expect(screen && screen->frame_index == test::kAtmFinalFrame,
           "final frame " + (screen ? std::to_string(screen->frame_index) : std::string("missing")));
  c.expect(secs < 10.0, "took " + fmt("%.2f", secs) + " s");
  c.note(std::to_string(observed.size()) + " golden events");
  c.note("run " + fmt("%.2f", secs) + " s");
}

std::string pointer_of(const std::string& bytes) {
  try {
    load_doc(bytes);
  } catch (const DocumentError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

void persistence(Check& c) {
  std::mt19937_64 rng(707);
  int mismatched = 0;
  for (int i = 0; i < 200; ++i) {
    const PrototypeDoc d = test::random_valid_doc(rng);
    const std::string bytes = save_doc(d);
    const PrototypeDoc back = load_doc(bytes);
    mismatched += !(back == d) || save_doc(back) != bytes;
  }
  c.expect(mismatched == 0, std::to_string(mismatched) + " of 200 docs failed to round-trip");

  const json valid = json::parse(save_doc(scenario::atm_doc()));
  c.expect(pointer_of(valid.dump()) == "<accepted>", "reference doc rejected");
  struct Case {
    std::function<void(json&)> mutate;
    std::string pointer;
  };
  const std::vector<Case> cases{
      {[](json& j) { j["connections"][0]["to"]["element"] = "ghost"; }, "/connections/0/to"},
      {[](json& j) { j["connections"][0]["from"]["port"] = "nope"; }, "/connections/0/from/port"},
      {[](json& j) { j["connections"][0]["to"]["port"] = "rewind"; }, "/connections/0/to/port"},
      {[](json& j) { j["elements"][1]["id"] = "screen"; }, "/elements/1/id"},
      {[](json& j) { j["elements"][1]["bounds"]["u"] = 0.95; }, "/elements/1/bounds"},
      {[](json& j) { j["elements"][1]["bounds"]["w"] = "wide"; }, "/elements/1/bounds/w"},
      {[](json& j) { j["elements"][0]["frame_index"] = 10; }, "/elements/0/frame_index"},
      {[](json& j) { j["elements"][1]["kind"] = "Knob"; }, "/elements/1/kind"},
      {[](json& j) { j["palette"].erase(1); }, "/palette"},
      {[](json& j) { j["mode"] = "play"; }, "/mode"},
      {[](json& j) { j["elements"][0]["colour"] = 1; }, "/elements/0/colour"},
  };
  int wrong = 0;
  for (const Case& k : cases) {
    json j = valid;
    k.mutate(j);
    const std::string got = pointer_of(j.dump());
    if (got != k.pointer) {
      ++wrong;
      c.expect(false, "expected " + k.pointer + ", got " + got);
    }
  }
  c.note("200 round-trips");
  c.note(std::to_string(cases.size() - wrong) + "/" + std::to_string(cases.size()) +
         " invalid docs located");
}

}  // namespace
}  // namespace vip

int main() {
  struct Criterion {
    const char* name;
    void (*run)(vip::Check&);
  };
  const Criterion criteria[] = {
      {"segmentation-oracle-equivalence", vip::segmentation},
      {"marker-localization", vip::marker_localization},
      {"canny-contract", vip::canny_contract},
      {"audio-band-pass-and-clicks", vip::audio},
      {"gesture-determinism-and-rules", vip::gesture},
      {"affine-fit-and-warp", vip::affine},
      {"atm-end-to-end", vip::atm},
      {"document-persistence", vip::persistence},
  };
  int failures = 0;
  for (const Criterion& k : criteria) {
    vip::Check check;
    const auto t0 = vip::Clock::now();
    try {
      k.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("threw: ") + e.what());
    }
    const double secs = vip::seconds_since(t0);
    std::printf("%s %s (%.2f s) %s\n", check.ok() ? "PASS" : "FAIL", k.name, secs,
                check.detail().c_str());
    std::fflush(stdout);
    failures += !check.ok();
  }
  return failures == 0 ? 0 : 1;
}

// vip: session runner, WebSocket service and per-module debug commands.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <regex>

#include <pthread.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "vip/audio.hpp"
#include "vip/edges.hpp"
#include "vip/error.hpp"
#include "vip/image_io.hpp"
#include "vip/pipeline.hpp"
#include "vip/raster.hpp"
#include "vip/renderer.hpp"
#include "vip/scenario.hpp"
#include "vip/server.hpp"
#include "vip/session.hpp"

namespace {

using namespace vip;

std::pair<int, int> parse_size(const std::string& s) {
  static const std::regex re(R"((\d+)x(\d+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw CLI::ValidationError("size", "expected WxH, got " + s);
  return {std::stoi(m[1]), std::stoi(m[2])};
}

DisplayQuad parse_quad(const std::string& s) {
  std::vector<double> v;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, ',');) v.push_back(std::stod(part));
  if (v.size() != 8) throw CLI::ValidationError("quad", "expected x0,y0,...,x3,y3 (TL TR BR BL)");
  DisplayQuad q;
  for (int i = 0; i < 4; ++i) q.corners[i] = {v[2 * i], v[2 * i + 1]};
  return q;
}

int run(const std::string& session, const std::string& log_override) {
  SessionConfig cfg = load_session_config(session);
  if (!log_override.empty()) cfg.log_path = log_override;
  const bool to_stdout = !cfg.log_path;
  const SessionEventLog log = run_session(cfg, [&](const nlohmann::ordered_json& r) {
    if (to_stdout) std::cout << r.dump() << '\n';
  });
  std::size_t gestures = 0;
  for (const auto& r : log.records) gestures += r["gestures"].size();
  std::cerr << "vip: " << log.records.size() << " ticks, " << gestures << " gesture events\n";
  return 0;
}

int serve(const std::string& session, const std::string& address, std::uint16_t port) {
  // Block the stop signals in every thread; the main thread waits for them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  Server server(load_session_config(session), {address, port});
  server.start();
  std::cerr << "vip: serving ws://" << address << ":" << server.port() << "/\n";
  int sig = 0;
  sigwait(&stop_signals, &sig);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual interactive prototyping engine"};
  app.require_subcommand(1);

  std::string session, log_path;
  auto* run_cmd = app.add_subcommand("run", "Replay a file-sourced session; JSON lines event log");
  run_cmd->add_option("session", session, "session.json")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--log", log_path, "Log file (overrides the config)");

  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;
  auto* serve_cmd = app.add_subcommand("serve", "WebSocket service for the workbench UI");
  serve_cmd->add_option("session", session, "session.json")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", port, "TCP port (0 picks one)")->capture_default_str();
  serve_cmd->add_option("--address", address, "Bind address")->capture_default_str();

  std::string in_path, out_path;
  HsvRange range;
  std::size_t min_area = 25;
  auto* seg_cmd = app.add_subcommand("segment", "HSV range mask of a PPM; prints the marker rect");
  seg_cmd->add_option("input", in_path, "in.ppm")->required()->check(CLI::ExistingFile);
  seg_cmd->add_option("output", out_path, "out.pgm")->required();
  seg_cmd->add_option("--hue-min", range.hue_min)->capture_default_str();
  seg_cmd->add_option("--hue-max", range.hue_max)->capture_default_str();
  seg_cmd->add_option("--sat-min", range.sat_min)->capture_default_str();
  seg_cmd->add_option("--sat-max", range.sat_max)->capture_default_str();
  seg_cmd->add_option("--val-min", range.val_min)->capture_default_str();
  seg_cmd->add_option("--val-max", range.val_max)->capture_default_str();
  seg_cmd->add_option("--min-area", min_area)->capture_default_str();

  CannyParams canny_params;
  auto* edges_cmd = app.add_subcommand("edges", "Canny edge map of a PPM");
  edges_cmd->add_option("input", in_path, "in.ppm")->required()->check(CLI::ExistingFile);
  edges_cmd->add_option("output", out_path, "out.pgm")->required();
  edges_cmd->add_option("--sigma", canny_params.sigma)->capture_default_str();
  edges_cmd->add_option("--t-high", canny_params.t_high)->capture_default_str();
  edges_cmd->add_option("--ratio", canny_params.ratio)->capture_default_str();

  ClickParams click;
  auto* clicks_cmd = app.add_subcommand("clicks", "Band-pass and threshold a WAV; JSON lines");
  clicks_cmd->add_option("input", in_path, "in.wav")->required()->check(CLI::ExistingFile);
  clicks_cmd->add_option("--threshold", click.level_threshold)->capture_default_str();
  clicks_cmd->add_option("--f-low", click.f_low)->capture_default_str();
  clicks_cmd->add_option("--f-high", click.f_high)->capture_default_str();
  clicks_cmd->add_option("--window", click.window)->capture_default_str();
  clicks_cmd->add_option("--debounce", click.debounce_ms, "ms")->capture_default_str();

  std::string resolution = "240x180", quad_text, frame_size = "320x240", assets_dir;
  auto* render_cmd = app.add_subcommand("render", "Compose a doc; optionally warp onto a quad");
  render_cmd->add_option("doc", in_path, "doc.json")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("output", out_path, "out.ppm")->required();
  render_cmd->add_option("--resolution", resolution, "Panel WxH")->capture_default_str();
  render_cmd->add_option("--quad", quad_text, "x0,y0,...,x3,y3: warp into a black frame");
  render_cmd->add_option("--frame", frame_size, "Frame WxH for --quad")->capture_default_str();
  render_cmd->add_option("--assets", assets_dir, "Screen asset root (default: doc directory)");

  std::string fixture, dir;
  auto* synth_cmd = app.add_subcommand("synth", "Write a scripted demo session");
  synth_cmd->add_option("fixture", fixture, "Fixture name")->required()->check(CLI::IsMember({"atm"}));
  synth_cmd->add_option("dir", dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(session, log_path);
    if (*serve_cmd) return serve(session, address, port);
    if (*seg_cmd) {
      if (!range.valid()) throw Error(ErrorCode::BadParam, "min above max in HSV range");
      const BinaryMask mask = segment(io::read_ppm(in_path), range);
      io::write_pgm(out_path, mask);
      nlohmann::ordered_json j{{"on", mask.count_on()}, {"marker", nullptr}};
      if (const auto r = locate_marker(mask, min_area)) {
        j["marker"] = {{"center", {r->center.x, r->center.y}},
                       {"width", r->width},
                       {"height", r->height},
                       {"angle", r->angle}};
      }
      std::cout << j.dump() << '\n';
      return 0;
    }
    if (*edges_cmd) {
      canny_params.validate();
      io::write_pgm(out_path, canny(to_gray(io::read_ppm(in_path)), canny_params));
      return 0;
    }
    if (*clicks_cmd) {
      const AudioChunk raw = io::read_wav(in_path);
      click.validate(raw.sample_rate);
      const AudioChunk filtered[] = {band_pass(raw, click.f_low, click.f_high)};
      for (const ClickEvent& c : detect_clicks(filtered, click)) {
        std::cout << nlohmann::ordered_json{{"time_ms", c.time_ms}, {"peak_level", c.peak_level}}.dump()
                  << '\n';
      }
      return 0;
    }
    if (*render_cmd) {
      const auto [w, h] = parse_size(resolution);
      const PrototypeDoc doc = load_doc(io::read_file(in_path));
      AssetCache assets(assets_dir.empty() ? std::filesystem::path(in_path).parent_path()
                                           : std::filesystem::path(assets_dir));
      Frame out = compose_panel(doc, w, h, assets);
      if (!quad_text.empty()) {
        const auto [fw, fh] = parse_size(frame_size);
        const QuadFit fit = fit_quad(w, h, parse_quad(quad_text));
        if (fit.br_residual > 1.0) {
          std::cerr << "vip: warning: quad is not a parallelogram; bottom-right off by "
                    << fit.br_residual << " px\n";
        }
        out = warp_into(out, fit.transform, Frame(fw, fh));
      }
      io::write_ppm(out_path, out);
      return 0;
    }
    if (*synth_cmd) {
      std::cout << scenario::write_atm_session(dir).string() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "vip: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

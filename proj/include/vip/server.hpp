#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vip/pipeline.hpp"
#include "vip/session.hpp"

namespace vip {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::uint16_t kCloseVersionMismatch = 4001;
inline constexpr std::uint16_t kCloseSessionBusy = 4009;

struct Outbound {
  std::string text;                     // one envelope
  std::optional<std::uint16_t> close;  // close the socket after sending
  std::string close_reason;
};

// Envelope {"v", "type", "payload"} builder.
std::string envelope(std::string_view type, nlohmann::ordered_json payload);

// Protocol state of one session, independent of sockets: SyntheticFrame
// rasterizes the scene and runs one pipeline tick, SyntheticTap schedules a
// tone burst at the latest tick's timestamp. Tick k is stamped
// round(k * tick_ms), so a replay of the same messages through files gives
// the same log. Strictly sequential.
class WireSession {
 public:
  explicit WireSession(const SessionConfig& config);

  std::vector<Outbound> handle(std::string_view message);
  // Reply to a client that arrives while another one holds the session.
  static Outbound busy();

  Pipeline& pipeline() noexcept { return pipeline_; }
  const std::string& image_format() const noexcept { return format_; }

 private:
  void on_hello(const nlohmann::json& p, std::vector<Outbound>& out);
  void on_frame(const nlohmann::json& p, std::vector<Outbound>& out);
  void on_tap(const nlohmann::json& p);
  Outbound doc_message();
  Outbound render_message(std::string_view view);

  SessionConfig cfg_;
  Pipeline pipeline_;
  std::string format_ = "ppm";
  std::vector<double> taps_;
  std::int64_t audio_cursor_ = 0;
  std::optional<std::uint64_t> rendered_revision_;
  std::ofstream log_;
};

struct ServeOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
};

// WebSocket front end. The network thread reads and writes; a session thread
// owns the WireSession and consumes inbound messages in arrival order, so
// ingest, tick and outbound streaming are separate stages joined by queues.
// One client at a time; a second is told "session busy" and closed with 4009.
class Server {
 public:
  Server(const SessionConfig& config, ServeOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const noexcept;
  void start();  // returns once the listener is running
  void wait();   // until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vip

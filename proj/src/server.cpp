#include "vip/server.hpp"

#include <atomic>
#include <deque>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/core/detail/base64.hpp>
#include <boost/beast/websocket.hpp>

#include "vip/error.hpp"
#include "vip/image_io.hpp"
#include "vip/log.hpp"
#include "vip/queue.hpp"
#include "vip/scenario.hpp"
#include "vip/synth.hpp"

namespace vip {

using nlohmann::json;
using nlohmann::ordered_json;

std::string envelope(std::string_view type, ordered_json payload) {
  ordered_json e;
  e["v"] = kProtocolVersion;
  e["type"] = type;
  e["payload"] = std::move(payload);
  return e.dump();
}

namespace {

// Rejects a payload; becomes an error frame, the connection stays up.
struct BadPayload {
  std::string message;
};

Outbound error_message(std::string_view code, std::string_view message, std::string_view reply_to,
                       const std::string& pointer = {}) {
  ordered_json p{{"code", code}, {"message", message}};
  if (!reply_to.empty()) p["in_reply_to"] = reply_to;
  if (!pointer.empty()) p["pointer"] = pointer;
  return {envelope("error", std::move(p)), std::nullopt, {}};
}

std::string base64(std::string_view bytes) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::optional<Vec2> marker_position(const json& v, const std::string& id) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_object() || !v.contains("x") || !v.contains("y") || !v["x"].is_number() ||
      !v["y"].is_number()) {
    throw BadPayload{"markers/" + id + ": expected {\"x\", \"y\"} or null"};
  }
  return Vec2{v["x"].get<double>(), v["y"].get<double>()};
}

}  // namespace

WireSession::WireSession(const SessionConfig& config)
    : cfg_(config), pipeline_(config, load_session_doc(config), config.sample_rate) {
  if (cfg_.log_path) {
    log_.open(*cfg_.log_path, std::ios::binary | std::ios::trunc);
    if (!log_) throw Error(ErrorCode::Io, "cannot write " + cfg_.log_path->string());
  }
}

Outbound WireSession::busy() {
  Outbound o = error_message("session_busy", "session busy", "");
  o.close = kCloseSessionBusy;
  o.close_reason = "session busy";
  return o;
}

Outbound WireSession::doc_message() {
  return {envelope("doc", {{"revision", pipeline_.revision()}, {"doc", doc_to_json(pipeline_.doc())}}),
          std::nullopt,
          {}};
}

Outbound WireSession::render_message(std::string_view view) {
  const Frame* f = nullptr;
  if (view == "panel") {
    f = &pipeline_.panel();
  } else if (view == "projection") {
    if (pipeline_.last_output().empty()) throw BadPayload{"no projection before the first frame"};
    f = &pipeline_.last_output();
  } else {
    throw BadPayload{"view must be \"panel\" or \"projection\""};
  }
  const std::string bytes = format_ == "png" ? io::encode_png(*f) : io::encode_ppm(*f);
  rendered_revision_ = pipeline_.revision();
  return {envelope("render", {{"revision", pipeline_.revision()},
                              {"view", view},
                              {"format", format_},
                              {"width", f->width()},
                              {"height", f->height()},
                              {"data", base64(bytes)}}),
          std::nullopt,
          {}};
}

void WireSession::on_hello(const json& p, std::vector<Outbound>& out) {
  if (p.contains("formats")) {
    const json& formats = p["formats"];
    if (!formats.is_array()) throw BadPayload{"formats: expected an array"};
    std::optional<std::string> chosen;
    for (const json& f : formats) {
      if (f.is_string() && (f == "png" || f == "ppm")) {
        chosen = f.get<std::string>();
        break;
      }
    }
    if (!chosen) throw BadPayload{"formats: none of png, ppm offered"};
    format_ = *chosen;
  }
  ordered_json markers = ordered_json::array();
  for (const MarkerConfig& m : cfg_.markers) markers.push_back(m.id);
  out.push_back({envelope("welcome", {{"protocol", kProtocolVersion},
                                      {"image_format", format_},
                                      {"tick_ms", cfg_.tick_ms},
                                      {"frame", {{"width", cfg_.scene.width}, {"height", cfg_.scene.height}}},
                                      {"panel", {{"width", cfg_.panel_width}, {"height", cfg_.panel_height}}},
                                      {"markers", markers},
                                      {"tick", pipeline_.ticks()},
                                      {"revision", pipeline_.revision()}}),
                 std::nullopt,
                 {}});
  out.push_back(doc_message());
}

void WireSession::on_frame(const json& p, std::vector<Outbound>& out) {
  std::vector<synth::MarkerPlacement> placed;
  if (p.contains("markers")) {
    const json& m = p["markers"];
    if (!m.is_object()) throw BadPayload{"markers: expected an object"};
    for (auto it = m.begin(); it != m.end(); ++it) {
      const bool known = std::any_of(cfg_.scene.markers.begin(), cfg_.scene.markers.end(),
                                     [&](const synth::SceneMarker& s) { return s.id == it.key(); });
      if (!known) throw BadPayload{"markers: unknown marker '" + it.key() + "'"};
      placed.push_back({it.key(), marker_position(*it, it.key())});
    }
  }
  const std::int64_t ts = scenario::tick_timestamp(pipeline_.ticks(), cfg_.tick_ms);
  TickInput in;
  in.frame = synth::render_scene(cfg_.scene, placed, ts);
  const std::int64_t end = synth::sample_at(static_cast<double>(ts), cfg_.sample_rate);
  in.audio = synth::render_taps(taps_, audio_cursor_, static_cast<std::size_t>(end - audio_cursor_),
                                cfg_.sample_rate);
  audio_cursor_ = end;
  // Bursts entirely behind the cursor can go.
  const double horizon_ms = 1000.0 * static_cast<double>(end) / cfg_.sample_rate - 1000.0;
  std::erase_if(taps_, [&](double t) { return t < horizon_ms; });

  TickResult r = pipeline_.step(in);
  if (log_) {
    log_ << r.record.dump() << '\n';
    log_.flush();
  }
  const auto tick = r.record["tick"];
  for (const GestureEvent& ev : r.events) {
    out.push_back({envelope("gesture", {{"tick", tick}, {"event", to_json(ev)}}), std::nullopt, {}});
  }
  out.push_back({envelope("tick", std::move(r.record)), std::nullopt, {}});
  if (r.doc_changed) {
    out.push_back(doc_message());
    out.push_back(render_message("panel"));
  }
}

void WireSession::on_tap(const json& p) {
  if (!p.is_object() && !p.is_null()) throw BadPayload{"expected an object"};
  const auto last = pipeline_.last_timestamp_ms();
  taps_.push_back(last ? static_cast<double>(*last) : 0.0);
}

std::vector<Outbound> WireSession::handle(std::string_view message) {
  std::vector<Outbound> out;
  json msg;
  try {
    msg = json::parse(message);
  } catch (const json::parse_error& e) {
    out.push_back(error_message("bad_message", e.what(), ""));
    return out;
  }
  if (!msg.is_object() || !msg.contains("v") || !msg.contains("type") || !msg["type"].is_string()) {
    out.push_back(error_message("bad_message", "expected {\"v\", \"type\", \"payload\"}", ""));
    return out;
  }
  const std::string type = msg["type"].get<std::string>();
  if (msg["v"] != kProtocolVersion) {
    Outbound o = error_message("version_mismatch",
                               "server speaks protocol " + std::to_string(kProtocolVersion), type);
    o.close = kCloseVersionMismatch;
    o.close_reason = "version mismatch";
    out.push_back(std::move(o));
    return out;
  }
  const json payload = msg.value("payload", json::object());
  try {
    if (type == "hello") {
      on_hello(payload, out);
    } else if (type == "synthetic_frame") {
      on_frame(payload, out);
    } else if (type == "synthetic_tap") {
      on_tap(payload);
    } else if (type == "mode_change") {
      if (!payload.contains("mode")) throw BadPayload{"mode: missing"};
      const bool changed = pipeline_.edit(json{{"op", "set_mode"}, {"mode", payload["mode"]}});
      out.push_back(doc_message());
      if (changed) out.push_back(render_message("panel"));
    } else if (type == "doc_edit") {
      const bool changed = pipeline_.edit(payload);
      out.push_back(doc_message());
      if (changed) out.push_back(render_message("panel"));
    } else if (type == "get_doc") {
      out.push_back(doc_message());
    } else if (type == "get_render") {
      out.push_back(render_message(payload.value("view", std::string("panel"))));
    } else {
      out.push_back(error_message("unknown_type", "no message type '" + type + "'", type));
    }
  } catch (const BadPayload& e) {
    out.push_back(error_message("bad_payload", e.message, type));
  } catch (const DocumentError& e) {
    out.push_back(error_message(to_string(e.code()), e.what(), type, e.pointer()));
  } catch (const Error& e) {
    out.push_back(error_message(to_string(e.code()), e.what(), type));
  } catch (const json::exception& e) {
    out.push_back(error_message("bad_payload", e.what(), type));
  }
  return out;
}

// --- transport -------------------------------------------------------------

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

class Peer;

struct Inbound {
  std::shared_ptr<Peer> from;
  std::string text;
};

// What a peer shares with the server: the inbound stage and the seat.
struct Hub {
  BoundedQueue<Inbound> inbound{64};
  std::atomic<bool> busy{false};
};

struct Server::Impl {
  Impl(const SessionConfig& cfg, const ServeOptions& opt) : session(cfg), acceptor(ioc) {
    const tcp::endpoint ep(net::ip::make_address(opt.address), opt.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
  }

  void accept();
  void work();

  WireSession session;
  net::io_context ioc;
  tcp::acceptor acceptor;
  Hub hub;
  std::thread network;
  std::thread worker;
  std::mutex stop_mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;
};

class Peer : public std::enable_shared_from_this<Peer> {
 public:
  Peer(tcp::socket socket, Hub& server) : ws_(std::move(socket)), server_(server) {}

  void start() {
    beast::error_code ec;
    ws_.next_layer().set_option(tcp::no_delay(true), ec);
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  // Network thread only.
  void send(Outbound out) {
    if (closing_) return;
    queue_.push_back(std::move(out));
    if (queue_.size() == 1) write_next();
  }

  void release() {
    if (owner_) {
      owner_ = false;
      server_.busy = false;
    }
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    if (server_.busy.exchange(true)) {
      send(WireSession::busy());
      return;
    }
    owner_ = true;
    read();
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      release();
      return;
    }
    std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (!server_.inbound.push({shared_from_this(), std::move(text)})) return;
    read();
  }

  void write_next() {
    ws_.async_write(net::buffer(queue_.front().text),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->on_write(ec);
                    });
  }

  void on_write(beast::error_code ec) {
    if (ec) {
      queue_.clear();
      release();
      return;
    }
    Outbound done = std::move(queue_.front());
    queue_.pop_front();
    if (done.close) {
      closing_ = true;
      queue_.clear();
      release();
      ws_.async_close(websocket::close_reason(static_cast<websocket::close_code>(*done.close), done.close_reason),
                      [self = shared_from_this()](beast::error_code) {});
      return;
    }
    if (!queue_.empty()) write_next();
  }

  websocket::stream<tcp::socket> ws_;
  Hub& server_;
  beast::flat_buffer buffer_;
  std::deque<Outbound> queue_;
  bool owner_ = false;
  bool closing_ = false;
};

void Server::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<Peer>(std::move(socket), hub)->start();
    accept();
  });
}

void Server::Impl::work() {
  while (auto msg = hub.inbound.pop()) {
    std::vector<Outbound> replies;
    try {
      replies = session.handle(msg->text);
    } catch (const std::exception& e) {
      // The tick itself failed; report and keep serving.
      replies.push_back(error_message("internal", e.what(), ""));
      log::warn(std::string("session: ") + e.what());
    }
    for (Outbound& o : replies) {
      net::post(ioc, [conn = msg->from, o = std::move(o)]() mutable { conn->send(std::move(o)); });
    }
  }
}

Server::Server(const SessionConfig& config, ServeOptions options)
    : impl_(std::make_unique<Impl>(config, options)) {}

Server::~Server() { stop(); }

std::uint16_t Server::port() const noexcept { return impl_->acceptor.local_endpoint().port(); }

void Server::start() {
  impl_->accept();
  impl_->worker = std::thread([this] { impl_->work(); });
  impl_->network = std::thread([this] { impl_->ioc.run(); });
}

void Server::wait() {
  std::unique_lock lock(impl_->stop_mutex);
  impl_->stopped_cv.wait(lock, [&] { return impl_->stopped; });
}

void Server::stop() {
  {
    std::lock_guard lock(impl_->stop_mutex);
    if (impl_->stopped) return;
    impl_->stopped = true;
  }
  impl_->hub.inbound.close();
  if (impl_->worker.joinable()) impl_->worker.join();
  impl_->ioc.stop();
  if (impl_->network.joinable()) impl_->network.join();
  impl_->stopped_cv.notify_all();
}

}  // namespace vip

#include "vip/log.hpp"

#include <iostream>
#include <mutex>

namespace vip::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& sink_slot() {
  static Sink sink = [](Severity severity, std::string_view message) {
    std::cerr << "vip: " << (severity == Severity::Warning ? "warning: " : "") << message << '\n';
  };
  return sink;
}

void emit(Severity severity, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink_slot()) sink_slot()(severity, message);
}

}  // namespace

void set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  sink_slot() = std::move(sink);
}

void warn(std::string_view message) { emit(Severity::Warning, message); }
void info(std::string_view message) { emit(Severity::Info, message); }

}  // namespace vip::log

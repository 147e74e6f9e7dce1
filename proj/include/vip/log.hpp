#pragma once

#include <functional>
#include <string_view>

namespace vip::log {

enum class Severity { Info, Warning };

using Sink = std::function<void(Severity, std::string_view)>;

// Default sink writes "vip: warning: ..." lines to stderr.
void set_sink(Sink sink);
void warn(std::string_view message);
void info(std::string_view message);

}  // namespace vip::log

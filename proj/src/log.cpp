#include "sclera/log.hpp"

#include <atomic>
#include <iostream>

namespace sclera {

namespace {
std::atomic<LogLevel> g_level{LogLevel::Warning};
}

void set_log_level(LogLevel level) { g_level = level; }

void log_warning(const std::string& msg) {
  if (g_level.load() != LogLevel::Quiet) std::cerr << "warning: " << msg << "\n";
}

void log_info(const std::string& msg) {
  if (g_level.load() == LogLevel::Info) std::cerr << msg << "\n";
}

}  // namespace sclera

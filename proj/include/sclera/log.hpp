#pragma once

#include <string>

namespace sclera {

enum class LogLevel { Quiet, Warning, Info };

void set_log_level(LogLevel level);
void log_warning(const std::string& msg);
void log_info(const std::string& msg);

}  // namespace sclera

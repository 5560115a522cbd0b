#pragma once

#include <string>

namespace tcs::log {

enum class Level {
  kQuiet = 0,
  kInfo = 1,
  kDebug = 2,
};

/// Current verbosity; initialized once from the TCS_LOG environment variable
/// ("quiet"/"info"/"debug" or 0/1/2, default quiet).
Level level();
void set_level(Level level);

void info(const std::string& message);
void debug(const std::string& message);

}  // namespace tcs::log

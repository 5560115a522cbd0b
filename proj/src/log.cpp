#include "tcs/core/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tcs::log {

namespace {

Level parse_env() {
  const char* env = std::getenv("TCS_LOG");
  if (env == nullptr) return Level::kQuiet;
  if (std::strcmp(env, "debug") == 0 || std::strcmp(env, "2") == 0) return Level::kDebug;
  if (std::strcmp(env, "info") == 0 || std::strcmp(env, "1") == 0) return Level::kInfo;
  return Level::kQuiet;
}

Level g_level = parse_env();

}  // namespace

Level level() { return g_level; }
void set_level(Level level) { g_level = level; }

void info(const std::string& message) {
  if (g_level >= Level::kInfo) std::fprintf(stderr, "[tcs] %s\n", message.c_str());
}

void debug(const std::string& message) {
  if (g_level >= Level::kDebug) std::fprintf(stderr, "[tcs:debug] %s\n", message.c_str());
}

}  // namespace tcs::log

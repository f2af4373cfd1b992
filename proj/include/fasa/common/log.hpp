#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace fasa::log {

// Verbosity comes from the FASA_LOG environment variable:
//   quiet | info (default) | debug
enum class Level { kQuiet = 0, kInfo = 1, kDebug = 2 };

inline Level level() {
  static Level lvl = [] {
    const char* env = std::getenv("FASA_LOG");
    if (env == nullptr) return Level::kInfo;
    if (std::strcmp(env, "quiet") == 0) return Level::kQuiet;
    if (std::strcmp(env, "debug") == 0) return Level::kDebug;
    return Level::kInfo;
  }();
  return lvl;
}

inline void info(const std::string& msg) {
  if (level() >= Level::kInfo) std::fprintf(stderr, "[fasa] %s\n", msg.c_str());
}

inline void debug(const std::string& msg) {
  if (level() >= Level::kDebug) std::fprintf(stderr, "[fasa:debug] %s\n", msg.c_str());
}

}  // namespace fasa::log

#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace hisac {

// Log verbosity is controlled by the HISAC_LOG environment variable:
// quiet | warn (default) | info | debug.
enum class LogLevel { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("HISAC_LOG");
    if (env == nullptr) return LogLevel::Warn;
    if (std::strcmp(env, "quiet") == 0) return LogLevel::Quiet;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

inline void log_msg(LogLevel level, const std::string& msg) {
  if (level > log_level()) return;
  const char* tag = level == LogLevel::Warn ? "warn" : level == LogLevel::Info ? "info" : "debug";
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

inline void log_warn(const std::string& msg) { log_msg(LogLevel::Warn, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::Debug, msg); }

}  // namespace hisac

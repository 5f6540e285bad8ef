#include "log.hpp"

#include <cstdlib>
#include <iostream>

namespace actgov::cli {

LogLevel log_level() {
  const char* env = std::getenv("AG_LOG");
  if (!env) return LogLevel::kError;
  const std::string v = env;
  if (v == "debug") return LogLevel::kDebug;
  if (v == "info") return LogLevel::kInfo;
  return LogLevel::kError;
}

void log(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static const char* names[] = {"error", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << "\n";
}

}  // namespace actgov::cli

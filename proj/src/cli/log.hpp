#pragma once

#include <string>

namespace actgov::cli {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

/// Level from AG_LOG (error, info, debug); defaults to error.
LogLevel log_level();
void log(LogLevel level, const std::string& message);

}  // namespace actgov::cli

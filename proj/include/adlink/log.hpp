#pragma once

#include <iostream>
#include <string_view>

namespace adlink::log {

enum class Level { debug, info, warn, error, quiet };

inline Level& threshold() {
    static Level level = Level::info;
    return level;
}

inline void write(Level level, std::string_view msg) {
    if (level < threshold()) return;
    static constexpr const char* tags[] = {"debug", "info", "warn", "error"};
    std::cerr << "[" << tags[static_cast<int>(level)] << "] " << msg << '\n';
}

inline void info(std::string_view msg) { write(Level::info, msg); }
inline void warn(std::string_view msg) { write(Level::warn, msg); }

}  // namespace adlink::log

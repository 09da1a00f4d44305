#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace yieldcast {

// Verbosity from YIELDCAST_LOG: quiet | info (default) | debug.
inline int log_level()
{
    static const int level = [] {
        const char* env = std::getenv("YIELDCAST_LOG");
        if (env == nullptr) {
            return 1;
        }
        const std::string_view v(env);
        if (v == "quiet" || v == "0") return 0;
        if (v == "debug" || v == "2") return 2;
        return 1;
    }();
    return level;
}

inline void log_warn(const std::string& msg)
{
    std::cerr << "[warn] " << msg << '\n';
}

inline void log_info(const std::string& msg)
{
    if (log_level() >= 1) {
        std::cerr << "[info] " << msg << '\n';
    }
}

inline void log_debug(const std::string& msg)
{
    if (log_level() >= 2) {
        std::cerr << "[debug] " << msg << '\n';
    }
}

}  // namespace yieldcast

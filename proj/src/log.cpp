#include "mfgnet/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace mfgnet {

namespace {

LogLevel parse_env() {
    const char* env = std::getenv("MFGNET_LOG");
    if (!env) return LogLevel::warn;
    const std::string s(env);
    if (s == "error") return LogLevel::error;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
}

std::atomic<int>& level_storage() {
    static std::atomic<int> level{static_cast<int>(parse_env())};
    return level;
}

const char* tag(LogLevel l) {
    switch (l) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_storage().load()); }

void set_log_level(LogLevel level) { level_storage().store(static_cast<int>(level)); }

void log(LogLevel level, const std::string& message) {
    if (static_cast<int>(level) > level_storage().load()) return;
    static std::mutex mu;
    std::lock_guard lock(mu);
    std::cerr << "[mfgnet " << tag(level) << "] " << message << '\n';
}

}  // namespace mfgnet

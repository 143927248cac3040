/*
   Copyright 2026 The rlst Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#include "rlst/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace rlst {

namespace {

const char* level_name(LogLevel level) {
    switch (level) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "warn";
}

LogLevel parse_threshold() {
    const char* raw = std::getenv("RLST_LOG_LEVEL");
    if (raw == nullptr) return LogLevel::warn;
    if (std::strcmp(raw, "error") == 0) return LogLevel::error;
    if (std::strcmp(raw, "warn") == 0) return LogLevel::warn;
    if (std::strcmp(raw, "info") == 0) return LogLevel::info;
    if (std::strcmp(raw, "debug") == 0) return LogLevel::debug;
    return LogLevel::warn;
}

}  // namespace

LogLevel log_threshold() {
    // Parsed once; the environment is not re-read after the first call.
    static const LogLevel threshold = parse_threshold();
    return threshold;
}

void log_message(LogLevel level, const std::string& message) {
    if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
    std::fprintf(stderr, "[%s] %s\n", level_name(level), message.c_str());
}

}  // namespace rlst

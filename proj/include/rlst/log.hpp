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
#pragma once

#include <string>

namespace rlst {

enum class LogLevel : int { error = 0, warn = 1, info = 2, debug = 3 };

/// Active threshold, parsed once from the RLST_LOG_LEVEL environment
/// variable ("error", "warn", "info", "debug"). Unset or unrecognized
/// values select "warn".
LogLevel log_threshold();

/// Writes "[level] message" plus a newline to stderr when `level` passes
/// the threshold; otherwise does nothing.
void log_message(LogLevel level, const std::string& message);

}  // namespace rlst

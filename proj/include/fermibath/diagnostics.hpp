#pragma once

#include <functional>
#include <string>

namespace fermibath {

using WarningHandler = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink. An empty handler silences warnings.
// The default handler writes to stderr.
void set_warning_handler(WarningHandler handler);

// Emits a warning; identical messages are reported once per process.
void warn(const std::string& message);

// Forget which messages were already reported.
void reset_warnings();

}  // namespace fermibath

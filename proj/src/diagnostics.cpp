#include "fermibath/diagnostics.hpp"

#include <cstdio>
#include <mutex>
#include <set>

namespace fermibath {

namespace {

std::mutex g_mutex;
std::set<std::string> g_seen;

void stderr_handler(const std::string& message) {
  std::fprintf(stderr, "fermibath: warning: %s\n", message.c_str());
}

WarningHandler& handler_slot() {
  static WarningHandler handler = stderr_handler;
  return handler;
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(g_mutex);
  handler_slot() = std::move(handler);
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (!g_seen.insert(message).second) return;
  if (handler_slot()) handler_slot()(message);
}

void reset_warnings() {
  std::lock_guard<std::mutex> lock(g_mutex);
  g_seen.clear();
}

}  // namespace fermibath

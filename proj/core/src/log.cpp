#include "factlearn/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace factlearn {
namespace {

std::mutex sink_mutex;

void stderr_sink(std::string_view message) { std::cerr << "warning: " << message << '\n'; }

WarningSink& current_sink() {
  static WarningSink sink = stderr_sink;
  return sink;
}

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  current_sink()(message);
}

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex);
  if (!sink) {
    sink = stderr_sink;
  }
  return std::exchange(current_sink(), std::move(sink));
}

}  // namespace factlearn

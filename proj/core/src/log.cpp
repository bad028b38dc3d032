#include "qrnn/log.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace qrnn {

namespace {

std::mutex& warn_mutex() {
  static std::mutex m;
  return m;
}

void print_once(std::string_view message) {
  static std::set<std::string> seen;
  if (seen.emplace(message).second) std::cerr << "warning: " << message << '\n';
}

WarningHandler& handler_slot() {
  static WarningHandler h = print_once;
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warn_mutex());
  WarningHandler previous = std::move(handler_slot());
  handler_slot() = handler ? std::move(handler) : WarningHandler(print_once);
  return previous;
}

void warn(std::string_view message) {
  std::lock_guard lock(warn_mutex());
  handler_slot()(message);
}

}  // namespace qrnn

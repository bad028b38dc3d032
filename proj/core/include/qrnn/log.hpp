#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace qrnn {

using WarningHandler = std::function<void(std::string_view)>;

/// Installs a process-wide warning sink and returns the previous one. The
/// default sink writes each distinct message to stderr once.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace qrnn

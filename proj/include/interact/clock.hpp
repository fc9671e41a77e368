#pragma once

#include <functional>
#include <string>

namespace interact {

// Source of ISO-8601 timestamps for persisted artifacts. Scripted runs use a
// fixed clock so transcripts compare byte for byte.
using Clock = std::function<std::string()>;

Clock system_clock();
Clock fixed_clock(std::string stamp = "1970-01-01T00:00:00Z");

}  // namespace interact

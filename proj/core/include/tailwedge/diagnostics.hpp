#pragma once

#include <functional>
#include <string>

namespace tailwedge::diag {

// Non-fatal conditioning warnings and estimator flags go through this channel.
// The default handler writes to stderr so machine-readable output (CSV on
// stdout) stays clean. Handlers must be safe to call from worker threads.
using Handler = std::function<void(const std::string&)>;

void set_handler(Handler handler);  // empty handler restores the default
void warn(const std::string& message);

}  // namespace tailwedge::diag

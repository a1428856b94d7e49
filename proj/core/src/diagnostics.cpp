#include "tailwedge/diagnostics.hpp"

#include <cstdio>
#include <mutex>

namespace tailwedge::diag {

namespace {
std::mutex g_mutex;
Handler g_handler;
}  // namespace

void set_handler(Handler handler) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_handler = std::move(handler);
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (g_handler) {
        g_handler(message);
    } else {
        std::fprintf(stderr, "tailwedge: warning: %s\n", message.c_str());
    }
}

}  // namespace tailwedge::diag

#include "lhi/error.hpp"

#include <iostream>
#include <mutex>

namespace lhi::logging {

namespace {
std::mutex g_sink_mutex;
WarnSink g_sink;  // empty -> default stderr sink
}  // namespace

void warn(std::string_view message) {
    std::lock_guard<std::mutex> lock(g_sink_mutex);
    if (g_sink) {
        g_sink(message);
    } else {
        std::cerr << "[warn] " << message << "\n";
    }
}

WarnSink set_warn_sink(WarnSink sink) {
    std::lock_guard<std::mutex> lock(g_sink_mutex);
    WarnSink previous = std::move(g_sink);
    g_sink = std::move(sink);
    return previous;
}

}  // namespace lhi::logging

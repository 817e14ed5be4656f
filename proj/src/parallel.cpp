#include "kd/parallel.hpp"

namespace kd {

namespace {
std::atomic<unsigned> g_threads{0};
}

unsigned thread_count() {
    unsigned n = g_threads.load();
    if (n) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void set_thread_count(unsigned n) { g_threads = n; }

}  // namespace kd

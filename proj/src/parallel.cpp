#include "polykde/parallel.hpp"

#include <atomic>

namespace polykde {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int t) { g_max_threads.store(t > 0 ? t : 0); }

int max_threads() { return g_max_threads.load(); }

}  // namespace polykde

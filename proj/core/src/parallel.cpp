#include "mmlab/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace mmlab {

namespace {
std::atomic<std::size_t> g_max_threads{1};
}

void set_max_threads(std::size_t n) { g_max_threads = std::max<std::size_t>(1, n); }

std::size_t max_threads() { return g_max_threads.load(); }

}  // namespace mmlab

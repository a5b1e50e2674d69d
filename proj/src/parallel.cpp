// parallel.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/parallel.hpp"

#include <atomic>

#ifdef DCOMP_HAVE_OPENMP
#include <omp.h>
#endif

namespace dcomp::par {

namespace {
std::atomic<Mode> g_mode{Mode::Parallel};
std::atomic<int> g_threads{0};
} // namespace

Mode mode() { return g_mode.load(std::memory_order_relaxed); }
void set_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }

int thread_count() { return g_threads.load(std::memory_order_relaxed); }

void set_thread_count(int n) {
    g_threads.store(n, std::memory_order_relaxed);
#ifdef DCOMP_HAVE_OPENMP
    if (n > 0) omp_set_num_threads(n);
#endif
}

bool openmp_enabled() {
#ifdef DCOMP_HAVE_OPENMP
    return true;
#else
    return false;
#endif
}

} // namespace dcomp::par

#include "hlx/par.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hlx::par {

namespace {
std::atomic<Mode> g_mode{
#ifdef _OPENMP
    Mode::openmp
#else
    Mode::serial
#endif
};
} // namespace

Mode mode() { return g_mode.load(std::memory_order_relaxed); }
void set_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }

bool openmp_compiled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int worker_count() {
#ifdef _OPENMP
    if (mode() == Mode::openmp) return omp_get_max_threads();
#endif
    return 1;
}

namespace detail {

void run_chunks(std::int64_t nchunks, void* ctx, void (*body)(void*, std::int64_t)) {
#ifdef _OPENMP
    if (g_mode.load(std::memory_order_relaxed) == Mode::openmp) {
#pragma omp parallel for schedule(static)
        for (std::int64_t c = 0; c < nchunks; ++c) body(ctx, c);
        return;
    }
#endif
    for (std::int64_t c = 0; c < nchunks; ++c) body(ctx, c);
}

} // namespace detail

} // namespace hlx::par

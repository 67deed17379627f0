#pragma once

#include <cstdint>
#include <vector>

// Execution layer for the hot loops. Every kernel runs in one of two modes:
// a plain serial loop (the reference implementation) or an OpenMP-parallel
// loop. Reductions are chunked with a fixed chunk count and combined in
// ascending chunk order, so both modes produce bitwise-identical results for
// any thread count; tests compare the modes directly and the bench target
// times them against each other.

namespace hlx::par {

enum class Mode { serial, openmp };

Mode mode();
void set_mode(Mode m);
bool openmp_compiled();
int worker_count(); // threads the openmp mode would use (1 in serial mode)

namespace detail {
void run_chunks(std::int64_t nchunks, void* ctx, void (*body)(void*, std::int64_t));
}

// Number of reduction chunks. Fixed (not tied to thread count) so that the
// summation tree is identical no matter how the chunks are scheduled.
inline constexpr std::int64_t reduce_chunks = 256;

template <class F>
void for_n(std::int64_t n, F&& f) {
    struct Ctx {
        F* f;
        std::int64_t n;
    } ctx{&f, n};
    // Dispatch whole index ranges per chunk to keep the per-element overhead
    // of the indirect call negligible.
    detail::run_chunks(reduce_chunks, &ctx, [](void* p, std::int64_t c) {
        auto& [fp, n] = *static_cast<Ctx*>(p);
        const std::int64_t lo = c * n / reduce_chunks;
        const std::int64_t hi = (c + 1) * n / reduce_chunks;
        for (std::int64_t i = lo; i < hi; ++i) (*fp)(i);
    });
}

template <class F>
double sum(std::int64_t n, F&& f) {
    std::vector<double> partial(static_cast<std::size_t>(reduce_chunks), 0.0);
    struct Ctx {
        F* f;
        std::int64_t n;
        double* partial;
    } ctx{&f, n, partial.data()};
    detail::run_chunks(reduce_chunks, &ctx, [](void* p, std::int64_t c) {
        auto& [fp, n, partial] = *static_cast<Ctx*>(p);
        const std::int64_t lo = c * n / reduce_chunks;
        const std::int64_t hi = (c + 1) * n / reduce_chunks;
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) s += (*fp)(i);
        partial[c] = s;
    });
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

template <class F>
double max(std::int64_t n, F&& f) {
    std::vector<double> partial(static_cast<std::size_t>(reduce_chunks), 0.0);
    struct Ctx {
        F* f;
        std::int64_t n;
        double* partial;
    } ctx{&f, n, partial.data()};
    detail::run_chunks(reduce_chunks, &ctx, [](void* p, std::int64_t c) {
        auto& [fp, n, partial] = *static_cast<Ctx*>(p);
        const std::int64_t lo = c * n / reduce_chunks;
        const std::int64_t hi = (c + 1) * n / reduce_chunks;
        double m = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            const double v = (*fp)(i);
            if (v > m) m = v;
        }
        partial[c] = m;
    });
    double total = 0.0; // fields are finite; 0 is the floor for |.|-style maxima
    for (double s : partial) {
        if (s > total) total = s;
    }
    return total;
}

} // namespace hlx::par

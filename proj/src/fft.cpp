#include "hlx/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "hlx/errors.hpp"
#include "hlx/par.hpp"

namespace hlx::fft {

namespace {

// One forward/backward plan pair per transform shape. Plans are created with
// FFTW_ESTIMATE so planning never depends on runtime measurements (identical
// plans on every run) and FFTW_UNALIGNED so they can execute on any buffer.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::tuple<int, int, int>, PlanPair>& plan_cache() {
    static std::map<std::tuple<int, int, int>, PlanPair> cache;
    return cache;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

// rank 2 plans use key (N, N, 0); rank 3 use (N, N, Nz)
PlanPair& plans_for(int N, int Nz) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plan_cache();
    auto key = std::make_tuple(N, N, Nz);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<cplx> a(static_cast<std::size_t>(N) * N * (Nz ? Nz : 1));
    std::vector<cplx> b(a.size());
    PlanPair p;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (Nz) {
        p.fwd = fftw_plan_dft_3d(N, N, Nz, as_fftw(a.data()), as_fftw(b.data()),
                                 FFTW_FORWARD, flags);
        p.bwd = fftw_plan_dft_3d(N, N, Nz, as_fftw(a.data()), as_fftw(b.data()),
                                 FFTW_BACKWARD, flags);
    } else {
        p.fwd = fftw_plan_dft_2d(N, N, as_fftw(a.data()), as_fftw(b.data()),
                                 FFTW_FORWARD, flags);
        p.bwd = fftw_plan_dft_2d(N, N, as_fftw(a.data()), as_fftw(b.data()),
                                 FFTW_BACKWARD, flags);
    }
    if (!p.fwd || !p.bwd) throw numerical_error("fft: plan creation failed");
    return cache.emplace(key, p).first->second;
}

// Parity sign (-1)^(i+j+k). Because N and Nz are even, the signed mode number
// has the same parity as the storage index, and this factor converts between
// FFT index phases and coordinate phases anchored at (-L,-L,-pi).
inline double parity(int i, int j, int k) { return ((i + j + k) & 1) ? -1.0 : 1.0; }
inline double parity(int i, int j) { return ((i + j) & 1) ? -1.0 : 1.0; }

} // namespace

void warmup(const GridSpec& g) {
    plans_for(g.N, g.Nz);
    plans_for(g.N, 0);
}

SpectralField forward(const ScalarField& f) {
    const GridSpec& g = f.grid;
    PlanPair& p = plans_for(g.N, g.Nz);
    std::vector<cplx> in(g.size3());
    const std::int64_t n = static_cast<std::int64_t>(g.size3());
    par::for_n(n, [&](std::int64_t i) { in[i] = f.v[i]; });
    SpectralField out(g);
    fftw_execute_dft(p.fwd, as_fftw(in.data()), as_fftw(out.c.data()));
    const double scale = 1.0 / static_cast<double>(g.size3());
    const int N = g.N, Nz = g.Nz;
    par::for_n(n, [&](std::int64_t t) {
        const int k = static_cast<int>(t % Nz);
        const int j = static_cast<int>((t / Nz) % N);
        const int i = static_cast<int>(t / (static_cast<std::int64_t>(N) * Nz));
        out.c[t] *= parity(i, j, k) * scale;
    });
    return out;
}

ScalarField inverse(const SpectralField& s) {
    const GridSpec& g = s.grid;
    PlanPair& p = plans_for(g.N, g.Nz);
    std::vector<cplx> in(g.size3());
    const std::int64_t n = static_cast<std::int64_t>(g.size3());
    const int N = g.N, Nz = g.Nz;
    par::for_n(n, [&](std::int64_t t) {
        const int k = static_cast<int>(t % Nz);
        const int j = static_cast<int>((t / Nz) % N);
        const int i = static_cast<int>(t / (static_cast<std::int64_t>(N) * Nz));
        in[t] = s.c[t] * parity(i, j, k);
    });
    std::vector<cplx> out(g.size3());
    fftw_execute_dft(p.bwd, as_fftw(in.data()), as_fftw(out.data()));
    ScalarField r(g);
    par::for_n(n, [&](std::int64_t i) { r.v[i] = out[i].real(); });
    return r;
}

Spec2 forward2(const Field2& f) {
    const GridSpec& g = f.grid;
    PlanPair& p = plans_for(g.N, 0);
    Spec2 out(g);
    std::vector<cplx> in(f.v); // execute may not run in-place with distinct out
    fftw_execute_dft(p.fwd, as_fftw(in.data()), as_fftw(out.c.data()));
    const double scale = 1.0 / static_cast<double>(g.size2());
    const int N = g.N;
    par::for_n(static_cast<std::int64_t>(g.size2()), [&](std::int64_t t) {
        const int j = static_cast<int>(t % N);
        const int i = static_cast<int>(t / N);
        out.c[t] *= parity(i, j) * scale;
    });
    return out;
}

Field2 inverse2(const Spec2& s) {
    const GridSpec& g = s.grid;
    PlanPair& p = plans_for(g.N, 0);
    std::vector<cplx> in(g.size2());
    const int N = g.N;
    par::for_n(static_cast<std::int64_t>(g.size2()), [&](std::int64_t t) {
        const int j = static_cast<int>(t % N);
        const int i = static_cast<int>(t / N);
        in[t] = s.c[t] * parity(i, j);
    });
    Field2 out(g);
    fftw_execute_dft(p.bwd, as_fftw(in.data()), as_fftw(out.v.data()));
    return out;
}

} // namespace hlx::fft

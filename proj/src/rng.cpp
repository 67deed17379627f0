#include "hlx/rng.hpp"

#include <cmath>

#include "hlx/fft.hpp"
#include "hlx/par.hpp"

namespace hlx::rng {

std::uint64_t Splitmix::at(std::uint64_t seed, std::uint64_t i) {
    std::uint64_t x = seed + (i + 1) * 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double Splitmix::next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

ScalarField white_field(const GridSpec& g, Splitmix& r, double amplitude) {
    ScalarField f(g);
    const std::uint64_t seed = r.seed;
    const std::uint64_t base = r.counter;
    double* v = f.v.data();
    par::for_n(static_cast<std::int64_t>(f.v.size()), [=](std::int64_t t) {
        const double u =
            static_cast<double>(Splitmix::at(seed, base + static_cast<std::uint64_t>(t)) >> 11) *
            0x1.0p-53;
        v[t] = amplitude * (2.0 * u - 1.0);
    });
    r.counter += f.v.size();
    return f;
}

ScalarField band_limited_field(const GridSpec& g, Splitmix& r, int kh_max, int kv_max,
                               double amplitude) {
    ScalarField f = white_field(g, r, amplitude);
    SpectralField s = fft::forward(f);
    cplx* c = s.c.data();
    const int N = g.N, Nz = g.Nz;
    par::for_n(static_cast<std::int64_t>(s.c.size()), [=, &g](std::int64_t t) {
        const int k = static_cast<int>(t % Nz);
        const std::int64_t ij = t / Nz;
        const int i = static_cast<int>(ij / N);
        const int j = static_cast<int>(ij % N);
        const bool cut_h = std::abs(g.hmode(i)) > kh_max || std::abs(g.hmode(j)) > kh_max;
        const bool cut_v = kv_max >= 0 && std::abs(g.vmode(k)) > kv_max;
        if (cut_h || cut_v) c[t] = cplx{};
    });
    return fft::inverse(s);
}

} // namespace hlx::rng

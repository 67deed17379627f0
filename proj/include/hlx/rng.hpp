#pragma once

#include <cstdint>

#include "hlx/grid.hpp"

// Counter-based random numbers for the randomized property checks. The
// value at counter i of a stream is the pure function at(seed, i) — the
// i-th output of the standard splitmix64 sequence — so any subsequence is
// reproducible from (algorithm name, seed, counter) alone, parallel fills
// stay deterministic, and independent streams split off cheaply. The
// algorithm is named in the run configuration ([rng] algorithm =
// splitmix64) so another implementation can reproduce every draw.

namespace hlx::rng {

struct Splitmix {
    std::uint64_t seed = 1;
    std::uint64_t counter = 0;

    explicit Splitmix(std::uint64_t s, std::uint64_t start = 0) : seed(s), counter(start) {}

    // i-th output of splitmix64 seeded with `seed`
    static std::uint64_t at(std::uint64_t seed, std::uint64_t i);

    std::uint64_t next() { return at(seed, counter++); }
    // uniform in [0, 1), 53-bit resolution
    double next_double();
    // uniform in [-1, 1)
    double next_symmetric() { return 2.0 * next_double() - 1.0; }

    // Independent derived stream; children draw from counters >= 2^63 of
    // the parent's sequence, far beyond any sequential use.
    Splitmix split(std::uint64_t stream) const {
        return Splitmix(at(seed, 0x8000000000000000ull + stream));
    }
};

// iid uniform [-amplitude, amplitude) samples; consumes size3 counters.
ScalarField white_field(const GridSpec& g, Splitmix& r, double amplitude = 1.0);

// White field restricted to |horizontal mode| <= kh_max and
// |vertical mode| <= kv_max: a smooth random trig polynomial for
// derivative/Bernstein-style checks. kv_max < 0 keeps every vertical mode.
ScalarField band_limited_field(const GridSpec& g, Splitmix& r, int kh_max, int kv_max = -1,
                               double amplitude = 1.0);

} // namespace hlx::rng

#pragma once

#include "hlx/grid.hpp"

// Transform plumbing between collocation samples and spectral coefficients.
// Backed by FFTW3 with FFTW_ESTIMATE plans (deterministic planning) shared
// through a small cache; plan execution uses the new-array interface and is
// safe to call from parallel workers on distinct buffers.

namespace hlx::fft {

SpectralField forward(const ScalarField& f);
ScalarField inverse(const SpectralField& s);

Spec2 forward2(const Field2& f);
Field2 inverse2(const Spec2& s);

// Create the plans for a grid up front (first use otherwise creates them
// lazily under a lock, which would serialize a parallel first pass).
void warmup(const GridSpec& g);

} // namespace hlx::fft

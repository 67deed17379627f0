#pragma once

#include <utility>
#include <vector>

#include "hlx/dyadic.hpp"
#include "hlx/grid.hpp"

// Spectral elliptic solves on the periodic box surrogate of R^2 x (-pi, pi):
// velocity recovery from vorticity (u-hat = i xi x w-hat / |xi|^2 with the
// zero-mean gauge), spectral curl, the pressure Poisson solve, and an L^1
// bound sweep over the band-localized per-vertical-mode kernels whose
// denominators are n^2 + |xi_h|^2.

namespace hlx::biot_savart {

// Cached inverse squared frequencies 1/(n^2 + |xi_h|^2) for one grid; the
// (0,0,0) entry is 0 (constants are gauged away).
struct MultiplierTable {
    GridSpec grid;
    std::vector<double> inv_xi2; // indexed like a SpectralField
    static const MultiplierTable& for_grid(const GridSpec& g);
};

// ||div v||_2 / ||grad v||_2 (0 for zero fields)
double divergence_rel_l2(const VectorField3& v);
double divergence_rel_linf(const VectorField3& v);
// largest |mean| over components, relative to ||v||_2 on the unit cell
double mean_rel(const VectorField3& v);

VectorField3 curl(const VectorField3& u);

// div_tol bounds the admissible relative divergence of the input; the mean
// of each component (which has no periodic velocity and is dropped by the
// inversion) is gated at max(1e-10, 0.01 * div_tol).
VectorField3 velocity_from_vorticity(const VectorField3& omega, double div_tol = 1e-8);

// Spectral solenoidal projection v -= grad invLap div v (zero mode untouched).
void project_divergence_free(VectorField3& v);

// -Delta p = div div (u (x) u), products dealiased, zero-mean gauge
ScalarField pressure_from_velocity(const VectorField3& u);

// residual ||Delta p + div div(u (x) u)||_2 / ||div div(u (x) u)||_2
double pressure_residual_rel(const VectorField3& u, const ScalarField& p);

struct KernelBoundRow {
    int j = 0;       // band index
    int n = 0;       // vertical mode (parametric integer)
    double raw_l1 = 0.0;        // discrete L^1 norm of the kernel
    double normalized = 0.0;    // raw * (n^2 + 2^{2j}) / 2^{2j}
};

struct KernelBoundReport {
    std::vector<KernelBoundRow> rows;
    double max_normalized = 0.0;
    double min_nonzero_normalized = 0.0;
};

// Sweeps bands j in j_range and the given vertical modes n, building each
// kernel as the inverse transform of xi_i |xi_h| / (n^2 + |xi_h|^2) windowed
// by a fattened band bump (identically 1 across the band support), and
// reports discrete L^1 norms with the scale-invariant normalization.
KernelBoundReport multiplier_bound_check(const GridSpec& g, const dyadic::DyadicProfile& pr,
                                         std::pair<int, int> j_range,
                                         const std::vector<int>& n_modes);

} // namespace hlx::biot_savart

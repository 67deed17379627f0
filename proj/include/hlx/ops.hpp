#pragma once

#include "hlx/grid.hpp"

// Spectral and pointwise field operations: derivatives, the 2/3-rule
// dealiasing projector, L^p quadrature norms, vertical Fourier coefficients,
// and the coordinate-weight helpers used by the moment diagnostics.

namespace hlx::ops {

// p argument for the L^p norms: 1, 2, or lp_inf.
inline constexpr int lp_inf = 0;

// ---- spectral side -------------------------------------------------------

// Multiply by i*k along an axis (0=x, 1=y, 2=z); Nyquist modes are zeroed so
// derivatives of real fields stay real.
void derivative_inplace(SpectralField& s, int axis);

// Product anti-aliasing projector; idempotent, diagonal, self-adjoint.
// Horizontal axes use the 2/3 rule (3|m| > N zeroed): the horizontal spectra
// are wide and quadratic aliasing there is a first-order hazard. The vertical
// axis only drops the Nyquist plane: a slab holds a handful of vertical
// modes, data band-limited in z aliases only through pairs summing past
// Nz/2 (geometrically small), and chopping the top third instead amputates
// live harmonics of the vertical cascade at O(1e-2) for Nz = 8.
void dealias_inplace(SpectralField& s);
// 2/3 rule on both axes of a horizontal spectrum.
void dealias_inplace(Spec2& s);

// ---- real side -----------------------------------------------------------

ScalarField partial_derivative(const ScalarField& f, int axis);
ScalarField dealias(const ScalarField& f);
ScalarField divergence(const VectorField3& v);

// Quadrature L^p norm over the slab, cell volume hx^2 * dz (p = 1, 2, lp_inf).
double lp_norm(const ScalarField& f, int p);
// Same for a complex horizontal field over the plane, cell area hx^2,
// measured on the modulus.
double lp_norm(const Field2& f, int p);
// max over components of |v| in L^p (p = lp_inf) or sqrt of summed squares (p = 2).
double lp_norm(const VectorField3& v, int p);

// u_n = (1/2pi) integral f e^{-inz} dz by the exact collocation sum; |n| < Nz/2.
Field2 vertical_coefficient(const ScalarField& f, int n);
// Complex-valued variant for a field given as (re, im) parts.
Field2 vertical_coefficient(const ScalarField& re, const ScalarField& im, int n);
// f += Re(g e^{inz}) (used to assemble collocated fields from coefficients).
void add_vertical_mode(ScalarField& f, const Field2& g, int n);

// Pointwise product and coordinate weights.
ScalarField multiply(const ScalarField& a, const ScalarField& b);
// axis 0 -> x*f, 1 -> y*f (coordinates of the sample points).
ScalarField multiply_coord(const ScalarField& f, int axis);
Field2 multiply_coord(const Field2& f, int axis);

// Fraction of the |f| mass sitting at max(|x|,|y|) >= 3L/4; the wraparound
// monitor for fields that are supposed to stay supported inside the box.
double boundary_mass_fraction(const ScalarField& f);

// Trigonometric interpolation onto a grid refined by fh (both horizontal
// axes) and fv (vertical): spectrum zero-padded, Nyquist split to keep the
// field real. Exact on band-limited data.
ScalarField refine(const ScalarField& f, int fh, int fv);

// Sup of the trigonometric interpolant: candidates from a refined grid,
// polished by Newton on the exact mode sum. The lattice max jitters at
// O(h^2) as features move between grid points; this does not, so conserved
// sup norms can be checked far below that level.
double sup_norm_interpolated(const ScalarField& f);

double linf_diff(const ScalarField& a, const ScalarField& b);
double l2_diff(const ScalarField& a, const ScalarField& b);

} // namespace hlx::ops

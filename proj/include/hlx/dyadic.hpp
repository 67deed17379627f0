#pragma once

#include <vector>

#include "hlx/grid.hpp"

// Dyadic frequency calculus on the horizontal plane: a concrete partition of
// unity subordinate to the annuli 2^q*[3/4, 8/3], band projections delta_q and
// the low-pass s_q, Besov and hybrid-Besov norms, the Bony product splitting,
// Bernstein-quotient measurements, and the coordinate-multiplier commutator
// x_i delta_j f - delta_j(x_i f) together with its spectral kernel form.

namespace hlx::dyadic {

// Radial profile built from a clamped quintic smoothstep chi:
//   chi = 1 on [0, 3/4], 0 on [4/3, inf), monotone C^2 in between,
//   phi(rho) = chi(rho/2) - chi(rho), supported exactly in [3/4, 8/3].
// Truncated band range [qmin, qmax]; the band sum telescopes to
//   chi(2^-(qmax+1) rho) - chi(2^-qmin rho),
// which equals 1 exactly for 4/3*2^qmin <= rho <= 3/2*2^qmax.
struct DyadicProfile {
    int qmin = 0;
    int qmax = 0;

    static double chi(double rho);
    static double dchi(double rho);
    static double phi(double rho);
    static double dphi(double rho);

    // phi_q(|xi|) = phi(2^-q |xi|)
    double band(int q, double xi) const;
    // inclusive edges of the exact partition-of-unity annulus
    double annulus_lo() const;
    double annulus_hi() const;

    bool contains(int q) const { return q >= qmin && q <= qmax; }
};

DyadicProfile build_partition(int qmin, int qmax);
int default_qmin(const GridSpec& g);
int default_qmax(const GridSpec& g);
DyadicProfile default_partition(const GridSpec& g);

Field2 delta_q(const Field2& f, int q, const DyadicProfile& pr);
// same band filter applied to the horizontal spectrum of a 3D field,
// acting plane by plane (the vertical direction is untouched)
ScalarField delta_q(const ScalarField& f, int q, const DyadicProfile& pr);
// sum of bands j <= q-1 within [qmin, qmax]; q may run to qmax+1
Field2 s_q(const Field2& f, int q, const DyadicProfile& pr);
// sharp restriction to the covered annulus (all bands at once)
Field2 project_annulus(const Field2& f, const DyadicProfile& pr);
// same restriction applied to the horizontal spectrum of a 3D field
ScalarField project_annulus(const ScalarField& f, const DyadicProfile& pr);

struct BesovParams {
    double s = 0.0;
    int p = 2;  // 1, 2 or ops::lp_inf
    int r = 1;  // 1 or r_inf
};
inline constexpr int r_inf = 0;

// A truncated homogeneous norm plus what the truncation left out: the low
// block |xi| < 4/3*2^qmin (zero mode included; homogeneous norms are defined
// modulo polynomials, so this part is reported, never summed) and the high
// residual above the covered annulus.
struct BesovResult {
    double value = 0.0;
    double low_freq = 0.0;
    double residual = 0.0;
};

BesovResult besov_norm(const Field2& f, const BesovParams& bp, const DyadicProfile& pr);
// sum over resolved vertical coefficients n of besov_norm(f_n)
BesovResult hybrid_besov_norm(const ScalarField& f, const BesovParams& bp,
                              const DyadicProfile& pr);

struct BonyParts {
    Field2 t_uv; // paraproduct: low(u) * bands(v)
    Field2 t_vu;
    Field2 remainder; // diagonal |j-q| <= 1 interactions
};

BonyParts bony_decompose(const Field2& u, const Field2& v, const DyadicProfile& pr);

// max_{|alpha|=k} ||d^alpha f||_b / (2^{q(k+2(1/a-1/b))} ||f||_a) for a band-
// limited f = delta_q f; the quotient the dyadic derivative estimates bound.
double bernstein_ratio(const Field2& f, int q, int k, int a, int b, const DyadicProfile& pr);

struct CommutatorPair {
    Field2 direct; // x_i * delta_j f - delta_j(x_i f)
    Field2 kernel; // spectral form: i 2^-j (d phi)(2^-j xi) (xi_i/|xi|) fhat
};

// axis is 1 (x) or 2 (y)
CommutatorPair moment_commutator(const Field2& f, int j, int axis, const DyadicProfile& pr);

} // namespace hlx::dyadic

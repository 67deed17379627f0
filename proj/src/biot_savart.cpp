#include "hlx/biot_savart.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "hlx/errors.hpp"
#include "hlx/fft.hpp"
#include "hlx/ops.hpp"
#include "hlx/par.hpp"

namespace hlx::biot_savart {

using fft::forward;
using fft::forward2;
using fft::inverse;
using fft::inverse2;

namespace {

// wavenumbers with the unpaired Nyquist lines dropped, matching the
// derivative convention used everywhere else
double kh(const GridSpec& g, int i) {
    const int m = g.hmode(i);
    if (2 * std::abs(m) == g.N) return 0.0;
    return std::acos(-1.0) / g.L * m;
}

double kv(const GridSpec& g, int k) {
    const int n = g.vmode(k);
    if (2 * std::abs(n) == g.Nz) return 0.0;
    return static_cast<double>(n);
}

struct Unpack {
    int i, j, k;
};

Unpack unpack3(const GridSpec& g, std::int64_t t) {
    const std::int64_t ij = t / g.Nz;
    return Unpack{static_cast<int>(ij / g.N), static_cast<int>(ij % g.N),
                  static_cast<int>(t % g.Nz)};
}

std::mutex g_table_mutex;
std::map<std::tuple<double, int, int>, MultiplierTable> g_tables;

} // namespace

const MultiplierTable& MultiplierTable::for_grid(const GridSpec& g) {
    std::lock_guard<std::mutex> lock(g_table_mutex);
    const auto key = std::make_tuple(g.L, g.N, g.Nz);
    auto it = g_tables.find(key);
    if (it != g_tables.end()) return it->second;
    MultiplierTable tab;
    tab.grid = g;
    tab.inv_xi2.assign(g.size3(), 0.0);
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(g.size3()); ++t) {
        const Unpack u = unpack3(g, t);
        const double pi_over_L = std::acos(-1.0) / g.L;
        const double kx = pi_over_L * g.hmode(u.i);
        const double ky = pi_over_L * g.hmode(u.j);
        const double kz = static_cast<double>(g.vmode(u.k));
        const double xi2 = kx * kx + ky * ky + kz * kz;
        tab.inv_xi2[static_cast<std::size_t>(t)] = xi2 > 0.0 ? 1.0 / xi2 : 0.0;
    }
    return g_tables.emplace(key, std::move(tab)).first->second;
}

double divergence_rel_l2(const VectorField3& v) {
    double grad2 = 0.0;
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) {
            const double n = ops::lp_norm(ops::partial_derivative(v.comp(b), a), 2);
            grad2 += n * n;
        }
    if (grad2 == 0.0) return 0.0;
    return ops::lp_norm(ops::divergence(v), 2) / std::sqrt(grad2);
}

double divergence_rel_linf(const VectorField3& v) {
    double grad = 0.0;
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a)
            grad = std::max(grad, ops::lp_norm(ops::partial_derivative(v.comp(b), a), ops::lp_inf));
    if (grad == 0.0) return 0.0;
    return ops::lp_norm(ops::divergence(v), ops::lp_inf) / grad;
}

double mean_rel(const VectorField3& v) {
    const std::int64_t n = static_cast<std::int64_t>(v.grid().size3());
    double worst = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double* p = v.comp(c).v.data();
        const double mean = par::sum(n, [p](std::int64_t t) { return p[t]; }) / n;
        const double rms =
            std::sqrt(par::sum(n, [p](std::int64_t t) { return p[t] * p[t]; }) / n);
        if (rms > 0.0) worst = std::max(worst, std::abs(mean) / rms);
    }
    return worst;
}

VectorField3 curl(const VectorField3& u) {
    const GridSpec& g = u.grid();
    SpectralField s1 = forward(u.x);
    SpectralField s2 = forward(u.y);
    SpectralField s3 = forward(u.z);
    SpectralField o1(g), o2(g), o3(g);
    const cplx* c1 = s1.c.data();
    const cplx* c2 = s2.c.data();
    const cplx* c3 = s3.c.data();
    cplx* r1 = o1.c.data();
    cplx* r2 = o2.c.data();
    cplx* r3 = o3.c.data();
    par::for_n(static_cast<std::int64_t>(g.size3()),
               [&g, c1, c2, c3, r1, r2, r3](std::int64_t t) {
                   const Unpack u3 = unpack3(g, t);
                   const cplx ikx{0.0, kh(g, u3.i)};
                   const cplx iky{0.0, kh(g, u3.j)};
                   const cplx ikz{0.0, kv(g, u3.k)};
                   r1[t] = iky * c3[t] - ikz * c2[t];
                   r2[t] = ikz * c1[t] - ikx * c3[t];
                   r3[t] = ikx * c2[t] - iky * c1[t];
               });
    VectorField3 out(g);
    out.x = inverse(o1);
    out.y = inverse(o2);
    out.z = inverse(o3);
    return out;
}

VectorField3 velocity_from_vorticity(const VectorField3& omega, double div_tol) {
    const GridSpec& g = omega.grid();
    if (!all_finite(omega))
        throw numerical_error("velocity_from_vorticity: non-finite vorticity input");
    const double div_rel = divergence_rel_l2(omega);
    if (div_rel > div_tol)
        throw numerical_error("velocity_from_vorticity: vorticity divergence defect " +
                              std::to_string(div_rel) + " (relative L2) exceeds " +
                              std::to_string(div_tol));
    // a mean vorticity component has no periodic velocity; the solve drops it,
    // so refuse inputs whose mean is material. Scaled off div_tol: both defects
    // are annihilated by the inversion, and one knob sets how consistent the
    // input must be (strict for generated data, looser inside a time step).
    const double mean_tol = std::max(1e-10, 0.01 * div_tol);
    const double mom = mean_rel(omega);
    if (mom > mean_tol)
        throw numerical_error("velocity_from_vorticity: vorticity mean defect " +
                              std::to_string(mom) + " (relative) exceeds " +
                              std::to_string(mean_tol));

    const MultiplierTable& tab = MultiplierTable::for_grid(g);
    SpectralField s1 = forward(omega.x);
    SpectralField s2 = forward(omega.y);
    SpectralField s3 = forward(omega.z);
    SpectralField o1(g), o2(g), o3(g);
    const cplx* c1 = s1.c.data();
    const cplx* c2 = s2.c.data();
    const cplx* c3 = s3.c.data();
    const double* itab = tab.inv_xi2.data();
    cplx* r1 = o1.c.data();
    cplx* r2 = o2.c.data();
    cplx* r3 = o3.c.data();
    par::for_n(static_cast<std::int64_t>(g.size3()),
               [&g, c1, c2, c3, r1, r2, r3, itab](std::int64_t t) {
                   const Unpack u3 = unpack3(g, t);
                   const double inv = itab[t];
                   const cplx ikx{0.0, kh(g, u3.i) * inv};
                   const cplx iky{0.0, kh(g, u3.j) * inv};
                   const cplx ikz{0.0, kv(g, u3.k) * inv};
                   r1[t] = iky * c3[t] - ikz * c2[t];
                   r2[t] = ikz * c1[t] - ikx * c3[t];
                   r3[t] = ikx * c2[t] - iky * c1[t];
               });
    VectorField3 out(g);
    out.x = inverse(o1);
    out.y = inverse(o2);
    out.z = inverse(o3);
    return out;
}

void project_divergence_free(VectorField3& v) {
    const GridSpec& g = v.grid();
    const MultiplierTable& tab = MultiplierTable::for_grid(g);
    SpectralField s1 = forward(v.x);
    SpectralField s2 = forward(v.y);
    SpectralField s3 = forward(v.z);
    cplx* c1 = s1.c.data();
    cplx* c2 = s2.c.data();
    cplx* c3 = s3.c.data();
    const double* itab = tab.inv_xi2.data();
    par::for_n(static_cast<std::int64_t>(g.size3()), [&g, c1, c2, c3, itab](std::int64_t t) {
        const Unpack u3 = unpack3(g, t);
        const double k1 = kh(g, u3.i), k2 = kh(g, u3.j), k3 = kv(g, u3.k);
        const cplx d = k1 * c1[t] + k2 * c2[t] + k3 * c3[t]; // div / i
        const double inv = itab[t];
        c1[t] -= k1 * inv * d;
        c2[t] -= k2 * inv * d;
        c3[t] -= k3 * inv * d;
    });
    v.x = inverse(s1);
    v.y = inverse(s2);
    v.z = inverse(s3);
}

namespace {

// dealiased spectrum of div div (u (x) u): sum_ab (i k_a)(i k_b) T_ab-hat
SpectralField divdiv_uu_hat(const VectorField3& u) {
    const GridSpec& g = u.grid();
    SpectralField acc(g);
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            SpectralField t = forward(ops::multiply(u.comp(a), u.comp(b)));
            ops::dealias_inplace(t);
            const double w = (a == b) ? 1.0 : 2.0;
            const cplx* src = t.c.data();
            cplx* dst = acc.c.data();
            par::for_n(static_cast<std::int64_t>(g.size3()),
                       [&g, src, dst, w, a, b](std::int64_t t3) {
                           const Unpack u3 = unpack3(g, t3);
                           const double k[3] = {kh(g, u3.i), kh(g, u3.j), kv(g, u3.k)};
                           dst[t3] += -w * k[a] * k[b] * src[t3];
                       });
        }
    return acc;
}

} // namespace

ScalarField pressure_from_velocity(const VectorField3& u) {
    const GridSpec& g = u.grid();
    SpectralField rhs = divdiv_uu_hat(u); // = (div div (u(x)u))-hat
    const MultiplierTable& tab = MultiplierTable::for_grid(g);
    const double* itab = tab.inv_xi2.data();
    cplx* c = rhs.c.data();
    // -Delta p = rhs  =>  p-hat = rhs-hat / |xi|^2, zero mode gauged to 0
    par::for_n(static_cast<std::int64_t>(g.size3()),
               [c, itab](std::int64_t t) { c[t] *= itab[t]; });
    return inverse(rhs);
}

double pressure_residual_rel(const VectorField3& u, const ScalarField& p) {
    const GridSpec& g = u.grid();
    require_same_grid(g, p.grid, "pressure_residual_rel");
    SpectralField rhs = divdiv_uu_hat(u);
    SpectralField ps = forward(p);
    double num = 0.0, den = 0.0;
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(g.size3()); ++t) {
        const Unpack u3 = unpack3(g, t);
        const double kx = kh(g, u3.i), ky = kh(g, u3.j), kz = kv(g, u3.k);
        const double xi2 = kx * kx + ky * ky + kz * kz;
        // Delta p + div div(u(x)u) should vanish: -xi^2 p-hat + rhs-hat = 0
        const cplx r = -xi2 * ps.c[static_cast<std::size_t>(t)] +
                       rhs.c[static_cast<std::size_t>(t)];
        num += std::norm(r);
        den += std::norm(rhs.c[static_cast<std::size_t>(t)]);
    }
    if (den == 0.0) return 0.0;
    return std::sqrt(num / den);
}

namespace {

// fattened band window: identically 1 on [3/4, 8/3] (the band support),
// supported in [27/64, 128/27]
double fat_band(double rho) {
    using dyadic::DyadicProfile;
    return (1.0 - DyadicProfile::chi(16.0 * rho / 9.0)) * DyadicProfile::chi(9.0 * rho / 32.0);
}

} // namespace

KernelBoundReport multiplier_bound_check(const GridSpec& g, const dyadic::DyadicProfile& pr,
                                         std::pair<int, int> j_range,
                                         const std::vector<int>& n_modes) {
    (void)pr; // the sweep uses the canonical band geometry; pr pins [qmin,qmax] semantics
    g.validate();
    if (j_range.first > j_range.second)
        throw config_error("multiplier_bound_check: empty band range");
    KernelBoundReport rep;
    rep.min_nonzero_normalized = 0.0;
    bool have_min = false;
    for (int j = j_range.first; j <= j_range.second; ++j) {
        for (int n : n_modes) {
            Spec2 m(g);
            double peak = 0.0;
            for (int i = 0; i < g.N; ++i) {
                for (int jj = 0; jj < g.N; ++jj) {
                    const double kx = std::acos(-1.0) / g.L * g.hmode(i);
                    const double ky = std::acos(-1.0) / g.L * g.hmode(jj);
                    const double r = std::hypot(kx, ky);
                    if (r == 0.0) continue; // zero-mode convention
                    const double w = fat_band(std::ldexp(r, -j));
                    if (w == 0.0) continue;
                    const double val = kx * r / (static_cast<double>(n) * n + r * r) * w;
                    m.c[g.idx2(i, jj)] = cplx{val, 0.0};
                    peak = std::max(peak, std::abs(val));
                }
            }
            if (peak == 0.0) continue; // band empty on this grid
            const Field2 kern = inverse2(m);
            KernelBoundRow row;
            row.j = j;
            row.n = n;
            row.raw_l1 = ops::lp_norm(kern, 1);
            const double two2j = std::ldexp(1.0, 2 * j);
            row.normalized = row.raw_l1 * (static_cast<double>(n) * n + two2j) / two2j;
            rep.rows.push_back(row);
            rep.max_normalized = std::max(rep.max_normalized, row.normalized);
            if (row.normalized > 0.0 &&
                (!have_min || row.normalized < rep.min_nonzero_normalized)) {
                rep.min_nonzero_normalized = row.normalized;
                have_min = true;
            }
        }
    }
    return rep;
}

} // namespace hlx::biot_savart

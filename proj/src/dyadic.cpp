#include "hlx/dyadic.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>

#include "hlx/errors.hpp"
#include "hlx/fft.hpp"
#include "hlx/ops.hpp"
#include "hlx/par.hpp"

namespace hlx::dyadic {

using fft::forward;
using fft::forward2;
using fft::inverse;
using fft::inverse2;

namespace {

// quintic smoothstep: s(0)=0, s(1)=1, s' = s'' = 0 at both ends
double smooth01(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double dsmooth01(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = t * (1.0 - t);
    return 30.0 * u * u;
}

constexpr double edge_lo = 0.75;       // chi == 1 up to here
constexpr double edge_hi = 4.0 / 3.0;  // chi == 0 from here on
constexpr double edge_w = edge_hi - edge_lo;

// Apply a horizontal-spectrum multiplier m(kx, ky) to a 2D complex field.
template <class M>
Field2 apply_multiplier(const Field2& f, M&& m) {
    Spec2 s = forward2(f);
    const GridSpec& g = s.grid;
    const std::int64_t n = static_cast<std::int64_t>(s.c.size());
    cplx* c = s.c.data();
    const M& mm = m;
    par::for_n(n, [&g, c, &mm](std::int64_t t) {
        const int i = static_cast<int>(t / g.N);
        const int j = static_cast<int>(t % g.N);
        c[t] *= mm(g.kx(i), g.kx(j));
    });
    return inverse2(s);
}

} // namespace

double DyadicProfile::chi(double rho) {
    rho = std::abs(rho);
    if (rho <= edge_lo) return 1.0;
    if (rho >= edge_hi) return 0.0;
    return 1.0 - smooth01((rho - edge_lo) / edge_w);
}

double DyadicProfile::dchi(double rho) {
    rho = std::abs(rho);
    if (rho <= edge_lo || rho >= edge_hi) return 0.0;
    return -dsmooth01((rho - edge_lo) / edge_w) / edge_w;
}

double DyadicProfile::phi(double rho) { return chi(0.5 * rho) - chi(rho); }

double DyadicProfile::dphi(double rho) { return 0.5 * dchi(0.5 * rho) - dchi(rho); }

double DyadicProfile::band(int q, double xi) const {
    return phi(std::ldexp(std::abs(xi), -q));
}

double DyadicProfile::annulus_lo() const { return edge_hi * std::ldexp(1.0, qmin); }

double DyadicProfile::annulus_hi() const { return 1.5 * std::ldexp(1.0, qmax); }

DyadicProfile build_partition(int qmin, int qmax) {
    if (qmin >= qmax)
        throw config_error("build_partition: need qmin < qmax, got [" +
                           std::to_string(qmin) + ", " + std::to_string(qmax) + "]");
    return DyadicProfile{qmin, qmax};
}

int default_qmin(const GridSpec& g) {
    // lowest nonzero horizontal frequency is pi/L; keep two spare octaves
    return -static_cast<int>(std::ceil(std::log2(g.L))) - 2;
}

int default_qmax(const GridSpec& g) {
    // highest dealiased frequency is about (pi/L) N/3; the band at
    // log2(N/2) - 1 already covers past the grid Nyquist when L ~ 2 pi
    int lg = 0;
    while ((1 << (lg + 1)) <= g.N / 2) ++lg;
    return lg - 1 - static_cast<int>(std::floor(std::log2(g.L / (2.0 * std::acos(-1.0)))));
}

DyadicProfile default_partition(const GridSpec& g) {
    return build_partition(default_qmin(g), default_qmax(g));
}

Field2 delta_q(const Field2& f, int q, const DyadicProfile& pr) {
    if (!pr.contains(q))
        throw config_error("delta_q: band " + std::to_string(q) + " outside [" +
                           std::to_string(pr.qmin) + ", " + std::to_string(pr.qmax) + "]");
    return apply_multiplier(f, [&pr, q](double kx, double ky) {
        return pr.band(q, std::hypot(kx, ky));
    });
}

ScalarField delta_q(const ScalarField& f, int q, const DyadicProfile& pr) {
    if (!pr.contains(q))
        throw config_error("delta_q: band " + std::to_string(q) + " outside [" +
                           std::to_string(pr.qmin) + ", " + std::to_string(pr.qmax) + "]");
    SpectralField s = forward(f);
    const GridSpec& g = s.grid;
    const std::int64_t n = static_cast<std::int64_t>(s.c.size());
    cplx* c = s.c.data();
    par::for_n(n, [&g, c, &pr, q](std::int64_t t) {
        const std::int64_t ij = t / g.Nz;
        const int i = static_cast<int>(ij / g.N);
        const int j = static_cast<int>(ij % g.N);
        c[t] *= pr.band(q, std::hypot(g.kx(i), g.kx(j)));
    });
    return inverse(s);
}

Field2 s_q(const Field2& f, int q, const DyadicProfile& pr) {
    if (q < pr.qmin || q > pr.qmax + 1)
        throw config_error("s_q: index " + std::to_string(q) + " outside [" +
                           std::to_string(pr.qmin) + ", " + std::to_string(pr.qmax + 1) + "]");
    // telescoped sum of bands qmin .. q-1
    return apply_multiplier(f, [&pr, q](double kx, double ky) {
        const double r = std::hypot(kx, ky);
        return DyadicProfile::chi(std::ldexp(r, -q)) -
               DyadicProfile::chi(std::ldexp(r, -pr.qmin));
    });
}

namespace {

double annulus_mask(const DyadicProfile& pr, double r) {
    return DyadicProfile::chi(std::ldexp(r, -(pr.qmax + 1))) -
           DyadicProfile::chi(std::ldexp(r, -pr.qmin));
}

} // namespace

Field2 project_annulus(const Field2& f, const DyadicProfile& pr) {
    return apply_multiplier(f, [&pr](double kx, double ky) {
        return annulus_mask(pr, std::hypot(kx, ky));
    });
}

ScalarField project_annulus(const ScalarField& f, const DyadicProfile& pr) {
    SpectralField s = forward(f);
    const GridSpec& g = s.grid;
    const std::int64_t n = static_cast<std::int64_t>(s.c.size());
    cplx* c = s.c.data();
    par::for_n(n, [&g, c, &pr](std::int64_t t) {
        const std::int64_t ij = t / g.Nz;
        const int i = static_cast<int>(ij / g.N);
        const int j = static_cast<int>(ij % g.N);
        c[t] *= annulus_mask(pr, std::hypot(g.kx(i), g.kx(j)));
    });
    return inverse(s);
}

namespace {

void check_besov_params(const BesovParams& bp) {
    if (bp.p != 1 && bp.p != 2 && bp.p != ops::lp_inf)
        throw config_error("besov_norm: p must be 1, 2 or lp_inf");
    if (bp.r != 1 && bp.r != r_inf)
        throw config_error("besov_norm: r must be 1 or r_inf");
}

} // namespace

BesovResult besov_norm(const Field2& f, const BesovParams& bp, const DyadicProfile& pr) {
    check_besov_params(bp);
    BesovResult out;
    Spec2 s = forward2(f);
    const GridSpec& g = s.grid;
    const std::int64_t n = static_cast<std::int64_t>(s.c.size());

    auto masked_norm = [&](auto&& mask) {
        Spec2 t = s;
        cplx* c = t.c.data();
        par::for_n(n, [&g, c, &mask](std::int64_t idx) {
            const int i = static_cast<int>(idx / g.N);
            const int j = static_cast<int>(idx % g.N);
            c[idx] *= mask(std::hypot(g.kx(i), g.kx(j)));
        });
        return ops::lp_norm(inverse2(t), bp.p);
    };

    for (int q = pr.qmin; q <= pr.qmax; ++q) {
        const double m = masked_norm([&pr, q](double r) { return pr.band(q, r); });
        const double w = m * std::exp2(bp.s * q);
        if (bp.r == 1)
            out.value += w;
        else
            out.value = std::max(out.value, w);
    }
    out.low_freq = masked_norm(
        [&pr](double r) { return DyadicProfile::chi(std::ldexp(r, -pr.qmin)); });
    out.residual = masked_norm([&pr](double r) {
        return 1.0 - DyadicProfile::chi(std::ldexp(r, -(pr.qmax + 1)));
    });
    return out;
}

BesovResult hybrid_besov_norm(const ScalarField& f, const BesovParams& bp,
                              const DyadicProfile& pr) {
    check_besov_params(bp);
    BesovResult out;
    const int half = f.grid.Nz / 2;
    // the unpaired mode n = -Nz/2 carries no resolvable oscillation and is
    // dropped (it is zeroed by dealiasing everywhere upstream)
    for (int n = -(half - 1); n <= half - 1; ++n) {
        const BesovResult bn = besov_norm(ops::vertical_coefficient(f, n), bp, pr);
        out.value += bn.value;
        out.low_freq += bn.low_freq;
        out.residual += bn.residual;
    }
    return out;
}

BonyParts bony_decompose(const Field2& u, const Field2& v, const DyadicProfile& pr) {
    require_same_grid(u.grid, v.grid, "bony_decompose");
    const GridSpec& g = u.grid;
    const int nb = pr.qmax - pr.qmin + 1;

    std::vector<Field2> du, dv;
    du.reserve(nb);
    dv.reserve(nb);
    for (int q = pr.qmin; q <= pr.qmax; ++q) {
        du.push_back(delta_q(u, q, pr));
        dv.push_back(delta_q(v, q, pr));
    }

    const std::int64_t n = static_cast<std::int64_t>(g.size2());
    Field2 tuv(g), tvu(g), rem(g);

    // running low-pass sums: su = s_{q-1} u = sum of bands < q-1
    std::vector<cplx> su(static_cast<std::size_t>(n), cplx{0.0, 0.0});
    std::vector<cplx> sv(static_cast<std::size_t>(n), cplx{0.0, 0.0});

    for (int b = 0; b < nb; ++b) {
        const cplx* dub = du[static_cast<std::size_t>(b)].v.data();
        const cplx* dvb = dv[static_cast<std::size_t>(b)].v.data();
        const cplx* dum1 = b >= 1 ? du[static_cast<std::size_t>(b - 1)].v.data() : nullptr;
        const cplx* dvm1 = b >= 1 ? dv[static_cast<std::size_t>(b - 1)].v.data() : nullptr;
        const cplx* dup1 = b + 1 < nb ? du[static_cast<std::size_t>(b + 1)].v.data() : nullptr;
        const cplx* dvp1 = b + 1 < nb ? dv[static_cast<std::size_t>(b + 1)].v.data() : nullptr;
        cplx* pu = su.data();
        cplx* pv = sv.data();
        cplx* ptuv = tuv.v.data();
        cplx* ptvu = tvu.v.data();
        cplx* prem = rem.v.data();
        par::for_n(n, [=](std::int64_t t) {
            ptuv[t] += pu[t] * dvb[t];
            ptvu[t] += pv[t] * dub[t];
            cplx near_v = dvb[t];
            if (dvm1) near_v += dvm1[t];
            if (dvp1) near_v += dvp1[t];
            prem[t] += dub[t] * near_v;
            // after use, fold band b-1 into the low-pass state so that at
            // step b+1 the sums hold s_{(b+1)+qmin-1}
            if (dum1) {
                pu[t] += dum1[t];
                pv[t] += dvm1[t];
            }
        });
    }
    return BonyParts{std::move(tuv), std::move(tvu), std::move(rem)};
}

double bernstein_ratio(const Field2& f, int q, int k, int a, int b,
                       const DyadicProfile& pr) {
    if (!pr.contains(q)) throw config_error("bernstein_ratio: band index out of range");
    if (k < 0) throw config_error("bernstein_ratio: derivative order must be >= 0");
    for (int p : {a, b})
        if (p != 1 && p != 2 && p != ops::lp_inf)
            throw config_error("bernstein_ratio: exponents must be 1, 2 or lp_inf");
    auto inv = [](int p) { return p == ops::lp_inf ? 0.0 : 1.0 / p; };
    if (inv(b) > inv(a))
        throw config_error("bernstein_ratio: need b >= a (embedding direction)");

    const double base = ops::lp_norm(f, a);
    if (base == 0.0) throw config_error("bernstein_ratio: zero field");

    double best = 0.0;
    for (int ay = 0; ay <= k; ++ay) {
        const int ax = k - ay;
        Field2 d = apply_multiplier(f, [ax, ay, &f](double kx, double ky) {
            // spectral monomial (i kx)^ax (i ky)^ay; Nyquist lines carry no
            // balanced partner and are dropped as in every derivative here
            const int half = f.grid.N / 2;
            const double nyq = std::acos(-1.0) / f.grid.L * half;
            if ((ax > 0 && std::abs(std::abs(kx) - nyq) < 1e-12) ||
                (ay > 0 && std::abs(std::abs(ky) - nyq) < 1e-12))
                return cplx{0.0, 0.0};
            cplx m{1.0, 0.0};
            const cplx ikx{0.0, kx}, iky{0.0, ky};
            for (int t = 0; t < ax; ++t) m *= ikx;
            for (int t = 0; t < ay; ++t) m *= iky;
            return m;
        });
        best = std::max(best, ops::lp_norm(d, b));
    }
    const double scale = std::exp2(static_cast<double>(q) * (k + 2.0 * (inv(a) - inv(b))));
    return best / (scale * base);
}

CommutatorPair moment_commutator(const Field2& f, int j, int axis,
                                 const DyadicProfile& pr) {
    if (axis != 1 && axis != 2) throw config_error("moment_commutator: axis must be 1 or 2");
    if (!pr.contains(j)) throw config_error("moment_commutator: band index out of range");

    Field2 term1 = ops::multiply_coord(delta_q(f, j, pr), axis - 1);
    Field2 term2 = delta_q(ops::multiply_coord(f, axis - 1), j, pr);
    Field2 direct(f.grid);
    {
        const cplx* p1 = term1.v.data();
        const cplx* p2 = term2.v.data();
        cplx* pd = direct.v.data();
        par::for_n(static_cast<std::int64_t>(direct.v.size()),
                   [=](std::int64_t t) { pd[t] = p1[t] - p2[t]; });
    }

    Field2 kernel = apply_multiplier(f, [j, axis](double kx, double ky) {
        const double r = std::hypot(kx, ky);
        if (r == 0.0) return cplx{0.0, 0.0};
        const double xi_i = axis == 1 ? kx : ky;
        const double amp = std::ldexp(DyadicProfile::dphi(std::ldexp(r, -j)), -j);
        return cplx{0.0, amp * xi_i / r};
    });
    return CommutatorPair{std::move(direct), std::move(kernel)};
}

} // namespace hlx::dyadic

#include "hlx/ops.hpp"

#include <cmath>
#include <string>

#include "hlx/errors.hpp"
#include "hlx/fft.hpp"
#include "hlx/par.hpp"

namespace hlx::ops {

namespace {
constexpr double pi = 3.14159265358979323846;

struct Idx3 {
    int N, Nz;
    void unpack(std::int64_t t, int& i, int& j, int& k) const {
        k = static_cast<int>(t % Nz);
        j = static_cast<int>((t / Nz) % N);
        i = static_cast<int>(t / (static_cast<std::int64_t>(N) * Nz));
    }
};
} // namespace

void derivative_inplace(SpectralField& s, int axis) {
    const GridSpec& g = s.grid;
    const Idx3 ix{g.N, g.Nz};
    const double kh = pi / g.L;
    par::for_n(static_cast<std::int64_t>(g.size3()), [&](std::int64_t t) {
        int i, j, k;
        ix.unpack(t, i, j, k);
        double w;
        bool nyq;
        if (axis == 0) {
            w = kh * g.hmode(i);
            nyq = (i == g.N / 2);
        } else if (axis == 1) {
            w = kh * g.hmode(j);
            nyq = (j == g.N / 2);
        } else {
            w = g.vmode(k);
            nyq = (k == g.Nz / 2);
        }
        s.c[t] = nyq ? cplx{} : cplx(0.0, w) * s.c[t];
    });
}

void dealias_inplace(SpectralField& s) {
    const GridSpec& g = s.grid;
    const Idx3 ix{g.N, g.Nz};
    // two-thirds rule on both horizontal axes, plus the vertical Nyquist
    // line, which is unpaired and must stay empty for real fields.
    const int kz = g.Nz / 2;
    par::for_n(static_cast<std::int64_t>(g.size3()), [&](std::int64_t t) {
        int i, j, k;
        ix.unpack(t, i, j, k);
        const bool cut = 3 * std::abs(g.hmode(i)) > g.N || 3 * std::abs(g.hmode(j)) > g.N ||
                         k == kz;
        if (cut) s.c[t] = cplx{};
    });
}

void dealias_inplace(Spec2& s) {
    const GridSpec& g = s.grid;
    par::for_n(static_cast<std::int64_t>(g.size2()), [&](std::int64_t t) {
        const int j = static_cast<int>(t % g.N);
        const int i = static_cast<int>(t / g.N);
        if (3 * std::abs(g.hmode(i)) > g.N || 3 * std::abs(g.hmode(j)) > g.N) s.c[t] = cplx{};
    });
}

ScalarField partial_derivative(const ScalarField& f, int axis) {
    if (axis < 0 || axis > 2) throw config_error("partial_derivative: axis must be 0, 1 or 2");
    SpectralField s = fft::forward(f);
    derivative_inplace(s, axis);
    return fft::inverse(s);
}

ScalarField dealias(const ScalarField& f) {
    SpectralField s = fft::forward(f);
    dealias_inplace(s);
    return fft::inverse(s);
}

ScalarField divergence(const VectorField3& v) {
    ScalarField d = partial_derivative(v.x, 0);
    const ScalarField dy = partial_derivative(v.y, 1);
    const ScalarField dz = partial_derivative(v.z, 2);
    par::for_n(static_cast<std::int64_t>(d.v.size()),
               [&](std::int64_t i) { d.v[i] += dy.v[i] + dz.v[i]; });
    return d;
}

namespace {
void check_p(int p) {
    if (p != 1 && p != 2 && p != lp_inf)
        throw config_error("lp_norm: p must be 1, 2 or lp_inf, got " + std::to_string(p));
}
} // namespace

double lp_norm(const ScalarField& f, int p) {
    check_p(p);
    const std::int64_t n = static_cast<std::int64_t>(f.v.size());
    const double cell = f.grid.hx() * f.grid.hx() * f.grid.dz();
    switch (p) {
        case 1:
            return cell * par::sum(n, [&](std::int64_t i) { return std::abs(f.v[i]); });
        case 2:
            return std::sqrt(cell * par::sum(n, [&](std::int64_t i) { return f.v[i] * f.v[i]; }));
        default:
            return par::max(n, [&](std::int64_t i) { return std::abs(f.v[i]); });
    }
}

double lp_norm(const Field2& f, int p) {
    check_p(p);
    const std::int64_t n = static_cast<std::int64_t>(f.v.size());
    const double cell = f.grid.hx() * f.grid.hx();
    switch (p) {
        case 1:
            return cell * par::sum(n, [&](std::int64_t i) { return std::abs(f.v[i]); });
        case 2:
            return std::sqrt(cell * par::sum(n, [&](std::int64_t i) { return std::norm(f.v[i]); }));
        default:
            return par::max(n, [&](std::int64_t i) { return std::abs(f.v[i]); });
    }
}

double lp_norm(const VectorField3& v, int p) {
    check_p(p);
    const std::int64_t n = static_cast<std::int64_t>(v.x.v.size());
    const double cell = v.grid().hx() * v.grid().hx() * v.grid().dz();
    switch (p) {
        case 1:
            return cell * par::sum(n, [&](std::int64_t i) {
                       return std::abs(v.x.v[i]) + std::abs(v.y.v[i]) + std::abs(v.z.v[i]);
                   });
        case 2:
            return std::sqrt(cell * par::sum(n, [&](std::int64_t i) {
                                 return v.x.v[i] * v.x.v[i] + v.y.v[i] * v.y.v[i] +
                                        v.z.v[i] * v.z.v[i];
                             }));
        default:
            return par::max(n, [&](std::int64_t i) {
                return std::max({std::abs(v.x.v[i]), std::abs(v.y.v[i]), std::abs(v.z.v[i])});
            });
    }
}

namespace {
void check_mode(const GridSpec& g, int n) {
    if (2 * std::abs(n) >= g.Nz)
        throw config_error("vertical_coefficient: mode " + std::to_string(n) +
                           " out of range for Nz=" + std::to_string(g.Nz));
}

std::vector<cplx> vertical_phases(const GridSpec& g, int n) {
    std::vector<cplx> ph(g.Nz);
    for (int k = 0; k < g.Nz; ++k) {
        const double a = -n * g.z(k);
        ph[k] = cplx(std::cos(a), std::sin(a));
    }
    return ph;
}
} // namespace

Field2 vertical_coefficient(const ScalarField& f, int n) {
    check_mode(f.grid, n);
    const GridSpec& g = f.grid;
    const auto ph = vertical_phases(g, n);
    Field2 out(g);
    par::for_n(static_cast<std::int64_t>(g.size2()), [&](std::int64_t t) {
        const std::size_t base = static_cast<std::size_t>(t) * g.Nz;
        cplx s{};
        for (int k = 0; k < g.Nz; ++k) s += f.v[base + k] * ph[k];
        out.v[t] = s / static_cast<double>(g.Nz);
    });
    return out;
}

Field2 vertical_coefficient(const ScalarField& re, const ScalarField& im, int n) {
    require_same_grid(re.grid, im.grid, "vertical_coefficient");
    check_mode(re.grid, n);
    const GridSpec& g = re.grid;
    const auto ph = vertical_phases(g, n);
    Field2 out(g);
    par::for_n(static_cast<std::int64_t>(g.size2()), [&](std::int64_t t) {
        const std::size_t base = static_cast<std::size_t>(t) * g.Nz;
        cplx s{};
        for (int k = 0; k < g.Nz; ++k) s += cplx(re.v[base + k], im.v[base + k]) * ph[k];
        out.v[t] = s / static_cast<double>(g.Nz);
    });
    return out;
}

void add_vertical_mode(ScalarField& f, const Field2& gfield, int n) {
    require_same_grid(f.grid, gfield.grid, "add_vertical_mode");
    check_mode(f.grid, n);
    const GridSpec& g = f.grid;
    std::vector<cplx> ph(g.Nz);
    for (int k = 0; k < g.Nz; ++k) {
        const double a = n * g.z(k);
        ph[k] = cplx(std::cos(a), std::sin(a));
    }
    par::for_n(static_cast<std::int64_t>(g.size2()), [&](std::int64_t t) {
        const std::size_t base = static_cast<std::size_t>(t) * g.Nz;
        const cplx c = gfield.v[t];
        for (int k = 0; k < g.Nz; ++k) f.v[base + k] += (c * ph[k]).real();
    });
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "multiply");
    ScalarField out(a.grid);
    par::for_n(static_cast<std::int64_t>(out.v.size()),
               [&](std::int64_t i) { out.v[i] = a.v[i] * b.v[i]; });
    return out;
}

ScalarField multiply_coord(const ScalarField& f, int axis) {
    if (axis != 0 && axis != 1) throw config_error("multiply_coord: axis must be 0 or 1");
    const GridSpec& g = f.grid;
    ScalarField out(g);
    const Idx3 ix{g.N, g.Nz};
    par::for_n(static_cast<std::int64_t>(g.size3()), [&](std::int64_t t) {
        int i, j, k;
        ix.unpack(t, i, j, k);
        out.v[t] = f.v[t] * g.x(axis == 0 ? i : j);
    });
    return out;
}

Field2 multiply_coord(const Field2& f, int axis) {
    if (axis != 0 && axis != 1) throw config_error("multiply_coord: axis must be 0 or 1");
    const GridSpec& g = f.grid;
    Field2 out(g);
    par::for_n(static_cast<std::int64_t>(g.size2()), [&](std::int64_t t) {
        const int j = static_cast<int>(t % g.N);
        const int i = static_cast<int>(t / g.N);
        out.v[t] = f.v[t] * g.x(axis == 0 ? i : j);
    });
    return out;
}

double boundary_mass_fraction(const ScalarField& f) {
    const GridSpec& g = f.grid;
    const Idx3 ix{g.N, g.Nz};
    const double edge = 0.75 * g.L;
    const std::int64_t n = static_cast<std::int64_t>(g.size3());
    const double total = par::sum(n, [&](std::int64_t i) { return std::abs(f.v[i]); });
    if (total <= 0.0) return 0.0;
    const double near = par::sum(n, [&](std::int64_t t) {
        int i, j, k;
        ix.unpack(t, i, j, k);
        const bool boundary = std::abs(g.x(i)) >= edge || std::abs(g.x(j)) >= edge;
        return boundary ? std::abs(f.v[t]) : 0.0;
    });
    return near / total;
}

ScalarField refine(const ScalarField& f, int fh, int fv) {
    if (fh < 1 || fv < 1) throw config_error("refine: factors must be >= 1");
    if (fh == 1 && fv == 1) return f;
    const GridSpec& g = f.grid;
    GridSpec gf{g.L, fh * g.N, fv * g.Nz};
    gf.validate();
    const SpectralField src = fft::forward(f);
    SpectralField dst(gf);

    // per-axis targets of a source mode: identity, or a half/half Nyquist
    // split (the fine grid holds +-N/2 as regular modes; splitting keeps the
    // interpolant real)
    struct Tgt {
        int idx[2];
        double w[2];
        int n = 0;
    };
    auto targets = [](int mode, int n_src, int n_dst, bool split) {
        Tgt t;
        if (split && mode == -n_src / 2) {
            t.idx[0] = n_src / 2;
            t.w[0] = 0.5;
            t.idx[1] = n_dst - n_src / 2;
            t.w[1] = 0.5;
            t.n = 2;
        } else {
            t.idx[0] = mode >= 0 ? mode : mode + n_dst;
            t.w[0] = 1.0;
            t.n = 1;
        }
        return t;
    };

    const Idx3 ix{g.N, g.Nz};
    par::for_n(static_cast<std::int64_t>(g.size3()), [&](std::int64_t t) {
        int i, j, k;
        ix.unpack(t, i, j, k);
        const Tgt tx = targets(g.hmode(i), g.N, gf.N, fh > 1);
        const Tgt ty = targets(g.hmode(j), g.N, gf.N, fh > 1);
        const Tgt tz = targets(g.vmode(k), g.Nz, gf.Nz, fv > 1);
        for (int a = 0; a < tx.n; ++a)
            for (int b = 0; b < ty.n; ++b)
                for (int c = 0; c < tz.n; ++c)
                    dst.c[gf.idx3(tx.idx[a], ty.idx[b], tz.idx[c])] =
                        tx.w[a] * ty.w[b] * tz.w[c] * src.c[t];
    });
    return fft::inverse(dst);
}

namespace {

// value/gradient/Hessian of the trigonometric interpolant at a point, by the
// exact mode sum (phase tables factor the 3D exponential per axis)
struct InterpPoint {
    double v = 0.0;
    double g[3] = {0.0, 0.0, 0.0};
    double h[3][3] = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
};

InterpPoint eval_interpolant(const SpectralField& s, double x, double y, double z) {
    const GridSpec& g = s.grid;
    const double kh = pi / g.L;
    std::vector<cplx> ex(g.N), ey(g.N), ez(g.Nz);
    std::vector<double> kxv(g.N), kzv(g.Nz);
    for (int i = 0; i < g.N; ++i) {
        const double k1 = (i == g.N / 2) ? 0.0 : kh * g.hmode(i); // Nyquist dropped
        kxv[i] = k1;
        ex[i] = cplx(std::cos(k1 * x), std::sin(k1 * x));
        ey[i] = cplx(std::cos(k1 * y), std::sin(k1 * y));
    }
    for (int k = 0; k < g.Nz; ++k) {
        const double k3 = (k == g.Nz / 2) ? 0.0 : static_cast<double>(g.vmode(k));
        kzv[k] = k3;
        ez[k] = cplx(std::cos(k3 * z), std::sin(k3 * z));
    }
    InterpPoint out;
    cplx v{};
    cplx gr[3] = {};
    cplx hs[3][3] = {};
    for (int i = 0; i < g.N; ++i) {
        if (i == g.N / 2) continue;
        for (int j = 0; j < g.N; ++j) {
            if (j == g.N / 2) continue;
            const cplx pxy = ex[i] * ey[j];
            const double kk[2] = {kxv[i], kxv[j]};
            for (int k = 0; k < g.Nz; ++k) {
                if (k == g.Nz / 2) continue;
                const cplx c = s.c[g.idx3(i, j, k)] * (pxy * ez[k]);
                const double kv[3] = {kk[0], kk[1], kzv[k]};
                v += c;
                const cplx ic = cplx(0.0, 1.0) * c;
                for (int a = 0; a < 3; ++a) {
                    gr[a] += kv[a] * ic;
                    for (int b = a; b < 3; ++b) hs[a][b] -= kv[a] * kv[b] * c;
                }
            }
        }
    }
    out.v = v.real();
    for (int a = 0; a < 3; ++a) {
        out.g[a] = gr[a].real();
        for (int b = a; b < 3; ++b) out.h[a][b] = out.h[b][a] = hs[a][b].real();
    }
    return out;
}

// solve (H - eps I) d = -g, 3x3, partial pivoting
void newton_dir(const double h[3][3], const double g[3], double eps, double d[3]) {
    double a[3][4];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) a[r][c] = h[r][c] - (r == c ? eps : 0.0);
        a[r][3] = -g[r];
    }
    for (int c = 0; c < 3; ++c) {
        int p = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        for (int q = 0; q < 4; ++q) std::swap(a[c][q], a[p][q]);
        if (a[c][c] == 0.0) {
            d[0] = d[1] = d[2] = 0.0;
            return;
        }
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double m = a[r][c] / a[c][c];
            for (int q = c; q < 4; ++q) a[r][q] -= m * a[c][q];
        }
    }
    for (int r = 0; r < 3; ++r) d[r] = a[r][3] / a[r][r];
}

} // namespace

double sup_norm_interpolated(const ScalarField& f) {
    const GridSpec& g = f.grid;
    const ScalarField fine = refine(f, 2, 2);
    const GridSpec& gf = fine.grid;

    // candidate starts: greedy top values of |fine|, separated by >= 4 fine
    // cells so a flat ridge contributes more than one foothold
    constexpr int K = 12;
    std::int64_t cand[K];
    int ncand = 0;
    std::vector<char> taken(fine.v.size(), 0);
    const Idx3 ixf{gf.N, gf.Nz};
    for (int pick = 0; pick < K; ++pick) {
        double best = -1.0;
        std::int64_t arg = -1;
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(fine.v.size()); ++t)
            if (!taken[t] && std::abs(fine.v[t]) > best) {
                best = std::abs(fine.v[t]);
                arg = t;
            }
        if (arg < 0) break;
        cand[ncand++] = arg;
        int ci, cj, ck;
        ixf.unpack(arg, ci, cj, ck);
        for (int di = -4; di <= 4; ++di)
            for (int dj = -4; dj <= 4; ++dj)
                for (int dk = -4; dk <= 4; ++dk) {
                    const int i = ((ci + di) % gf.N + gf.N) % gf.N;
                    const int j = ((cj + dj) % gf.N + gf.N) % gf.N;
                    const int k = ((ck + dk) % gf.Nz + gf.Nz) % gf.Nz;
                    taken[gf.idx3(i, j, k)] = 1;
                }
    }

    const SpectralField spec = fft::forward(f);
    const double hf = gf.hx();
    double sup = 0.0;
    for (int c = 0; c < ncand; ++c) {
        int ci, cj, ck;
        ixf.unpack(cand[c], ci, cj, ck);
        double x = gf.x(ci), y = gf.x(cj), z = gf.z(ck);
        InterpPoint p = eval_interpolant(spec, x, y, z);
        const double sgn = p.v >= 0.0 ? 1.0 : -1.0;
        double val = sgn * p.v;
        double trust = hf;
        for (int it = 0; it < 40; ++it) {
            double hn = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) hn = std::max(hn, std::abs(p.h[a][b]));
            // shift keeps sgn*(H - eps I) negative definite along the ridge
            const double eps = 1e-8 * std::max(hn, 1.0);
            double gs[3], hsm[3][3], d[3];
            for (int a = 0; a < 3; ++a) {
                gs[a] = sgn * p.g[a];
                for (int b = 0; b < 3; ++b) hsm[a][b] = sgn * p.h[a][b];
            }
            newton_dir(hsm, gs, eps, d);
            double dn = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
            if (dn > trust)
                for (double& dd : d) dd *= trust / dn;
            InterpPoint q = eval_interpolant(spec, x + d[0], y + d[1], z + d[2]);
            if (sgn * q.v >= val) {
                x += d[0];
                y += d[1];
                z += d[2];
                p = q;
                const double gain = sgn * q.v - val;
                val = sgn * q.v;
                trust = std::min(2.0 * trust, hf);
                if (gain <= 1e-15 * std::abs(val)) break;
            } else {
                trust *= 0.25;
                if (trust < 1e-12 * hf) break;
            }
        }
        sup = std::max(sup, val);
    }
    return sup;
}

double linf_diff(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "linf_diff");
    return par::max(static_cast<std::int64_t>(a.v.size()),
                    [&](std::int64_t i) { return std::abs(a.v[i] - b.v[i]); });
}

double l2_diff(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "l2_diff");
    const double cell = a.grid.hx() * a.grid.hx() * a.grid.dz();
    return std::sqrt(cell * par::sum(static_cast<std::int64_t>(a.v.size()), [&](std::int64_t i) {
                         const double d = a.v[i] - b.v[i];
                         return d * d;
                     }));
}

} // namespace hlx::ops

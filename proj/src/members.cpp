#include "hlx/members.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>

#include "hlx/errors.hpp"
#include "hlx/ops.hpp"
#include "hlx/par.hpp"

namespace hlx::members {

namespace {

// e^{inz} sampled on the vertical lattice; the winding is shared by every
// point of a plane, so one cosine/sine per plane is enough.
struct Winding {
    std::vector<double> c, s;
    Winding(const GridSpec& g, int n) : c(g.Nz), s(g.Nz) {
        for (int k = 0; k < g.Nz; ++k) {
            c[k] = std::cos(n * g.z(k));
            s[k] = std::sin(n * g.z(k));
        }
    }
};

// Collocates a vertical coefficient: the stored member field is the product
// (coefficient)(x, y) e^{inz}, so the winding is applied here, once, and the
// evolution then never needs to know n. Keeping the winding inside the field
// matters for correctness, not just convenience: the transport scheme's
// anti-aliasing line (the vertical Nyquist) is self-paired under the
// Hermitian symmetry of a real field's spectrum, so cutting it preserves
// reality. A factored representation would need the cut moved to the line
// the winding maps onto the Nyquist, and zeroing that line in the spectrum
// of a real component field breaks its Hermitian symmetry -- the real part
// of the inverse transform then silently smears the cut across two lab
// modes. Collocated members sidestep this entirely and make the member sum
// commute with the main update exactly (both run the identical operator).
ComplexField expand(const Field2& f, const GridSpec& g, int n) {
    ComplexField out(g);
    const Winding w(g, n);
    double* re = out.re.v.data();
    double* im = out.im.v.data();
    const cplx* p = f.v.data();
    const double* c = w.c.data();
    const double* s = w.s.data();
    const int nz = g.Nz;
    par::for_n(static_cast<std::int64_t>(out.re.v.size()), [=](std::int64_t t) {
        const cplx y = p[t / nz];
        const int k = static_cast<int>(t % nz);
        re[t] = y.real() * c[k] - y.imag() * s[k];
        im[t] = y.real() * s[k] + y.imag() * c[k];
    });
    return out;
}

// dst += s * a * b, pointwise. The member sources are plain collocation
// products: anti-aliasing them would break the cancellation against the
// coordinate commutator of the conservative transport.
void add_product(ScalarField& dst, const ScalarField& a, const ScalarField& b, double s) {
    require_same_grid(dst.grid, a.grid, "members source term");
    double* d = dst.v.data();
    const double* pa = a.v.data();
    const double* pb = b.v.data();
    par::for_n(static_cast<std::int64_t>(dst.v.size()),
               [=](std::int64_t t) { d[t] += s * pa[t] * pb[t]; });
}

double sup_modulus(const ScalarField& re, const ScalarField& im) {
    const double* a = re.v.data();
    const double* b = im.v.data();
    return par::max(static_cast<std::int64_t>(re.v.size()), [=](std::int64_t t) {
        return std::sqrt(a[t] * a[t] + b[t] * b[t]);
    });
}

// Flattened real-field view of one member, in a fixed order the tendency
// indexes into: w1, w2, wz, then (when carried) mx1, mx2, my1, my2, each as
// (re, im).
std::vector<ScalarField*> field_slots(DecompositionMember& m) {
    std::vector<ScalarField*> f = {&m.w1.re, &m.w1.im, &m.w2.re,
                                   &m.w2.im, &m.wz.re, &m.wz.im};
    if (m.has_moments) {
        for (ComplexField* c : {&m.mx1, &m.mx2, &m.my1, &m.my2}) {
            f.push_back(&c->re);
            f.push_back(&c->im);
        }
    }
    return f;
}

using FieldVec = std::vector<ScalarField>;

FieldVec axpy_vec(const FieldVec& base, double a, const FieldVec& k) {
    FieldVec out;
    out.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        ScalarField o(base[i].grid);
        const double* b = base[i].v.data();
        const double* kk = k[i].v.data();
        double* p = o.v.data();
        par::for_n(static_cast<std::int64_t>(o.v.size()),
                   [=](std::int64_t t) { p[t] = b[t] + a * kk[t]; });
        out.push_back(std::move(o));
    }
    return out;
}

void acc_scaled(FieldVec& acc, double a, const FieldVec& k) {
    for (std::size_t i = 0; i < acc.size(); ++i) {
        double* p = acc[i].v.data();
        const double* kk = k[i].v.data();
        par::for_n(static_cast<std::int64_t>(acc[i].v.size()),
                   [=](std::int64_t t) { p[t] += a * kk[t]; });
    }
}

// Stage tendency of one member: every component rides the main solver's
// conservative transport verbatim, then the sources couple wz into (w1, w2)
// and, when moments are carried, (w1, w2) into the four moments. The moment
// sources are closed by the member identities x wz = w2 and y wz = -w1.
FieldVec tendency(const FieldVec& y, const evolve::StageVelocity& sv, bool dealias,
                  bool moments) {
    FieldVec k;
    k.reserve(y.size());
    for (const ScalarField& f : y)
        k.push_back(evolve::transport_tendency(f, sv.utx, sv.uty, dealias));
    // w1 <- -uty * wz, w2 <- +utx * wz
    add_product(k[0], sv.uty, y[4], -1.0);
    add_product(k[1], sv.uty, y[5], -1.0);
    add_product(k[2], sv.utx, y[4], +1.0);
    add_product(k[3], sv.utx, y[5], +1.0);
    if (moments) {
        // mx1 <- utx*w1 - uty*w2,  mx2 <- 2 utx*w2,
        // my1 <- 2 uty*w1,         my2 <- uty*w2 - utx*w1
        add_product(k[6], sv.utx, y[0], +1.0);
        add_product(k[6], sv.uty, y[2], -1.0);
        add_product(k[7], sv.utx, y[1], +1.0);
        add_product(k[7], sv.uty, y[3], -1.0);
        add_product(k[8], sv.utx, y[2], +2.0);
        add_product(k[9], sv.utx, y[3], +2.0);
        add_product(k[10], sv.uty, y[0], +2.0);
        add_product(k[11], sv.uty, y[1], +2.0);
        add_product(k[12], sv.uty, y[2], +1.0);
        add_product(k[12], sv.utx, y[0], -1.0);
        add_product(k[13], sv.uty, y[3], +1.0);
        add_product(k[13], sv.utx, y[1], -1.0);
    }
    return k;
}

void rk4_member(DecompositionMember& m, const StageSet& s, bool dealias) {
    std::vector<ScalarField*> slots = field_slots(m);
    FieldVec y0;
    y0.reserve(slots.size());
    for (ScalarField* p : slots) y0.push_back(*p);

    FieldVec k = tendency(y0, s.stages[0], dealias, m.has_moments);
    FieldVec acc = k; // k1
    FieldVec ys = axpy_vec(y0, 0.5 * s.dt, k);
    k = tendency(ys, s.stages[1], dealias, m.has_moments);
    acc_scaled(acc, 2.0, k); // + 2 k2
    ys = axpy_vec(y0, 0.5 * s.dt, k);
    k = tendency(ys, s.stages[2], dealias, m.has_moments);
    acc_scaled(acc, 2.0, k); // + 2 k3
    ys = axpy_vec(y0, s.dt, k);
    k = tendency(ys, s.stages[3], dealias, m.has_moments);
    acc_scaled(acc, 1.0, k); // + k4

    const double c = s.dt / 6.0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        double* o = slots[i]->v.data();
        const double* b = y0[i].v.data();
        const double* a = acc[i].v.data();
        par::for_n(static_cast<std::int64_t>(slots[i]->v.size()),
                   [=](std::int64_t t) { o[t] = b[t] + c * a[t]; });
    }
}

const DecompositionMember* first_active(const std::vector<DecompositionMember>& members) {
    for (const DecompositionMember& m : members)
        if (m.active) return &m;
    return nullptr;
}

bool member_finite(const DecompositionMember& m) {
    DecompositionMember& mm = const_cast<DecompositionMember&>(m);
    for (ScalarField* f : field_slots(mm))
        if (!all_finite(*f)) return false;
    return true;
}

} // namespace

std::vector<DecompositionMember> init_members(const ScalarField& omega_z0,
                                              const dyadic::DyadicProfile& pr,
                                              const InitOptions& opt) {
    const GridSpec& g = omega_z0.grid;
    const int n_cap = g.Nz / 2 - 1;
    const int n_lo = opt.n_min == InitOptions::unset ? -n_cap : opt.n_min;
    const int n_hi = opt.n_max == InitOptions::unset ? +n_cap : opt.n_max;
    const int q_lo = opt.q_min == InitOptions::unset ? pr.qmin : opt.q_min;
    const int q_hi = opt.q_max == InitOptions::unset ? pr.qmax : opt.q_max;
    if (n_lo > n_hi || n_lo < -n_cap || n_hi > n_cap)
        throw config_error("init_members: vertical mode range [" + std::to_string(n_lo) + ", " +
                           std::to_string(n_hi) + "] exceeds the resolved modes |n| <= " +
                           std::to_string(n_cap));
    if (q_lo > q_hi || q_lo < pr.qmin || q_hi > pr.qmax)
        throw config_error("init_members: band range [" + std::to_string(q_lo) + ", " +
                           std::to_string(q_hi) + "] outside the partition [" +
                           std::to_string(pr.qmin) + ", " + std::to_string(pr.qmax) + "]");

    // First pass: split into plane fields and find the largest member.
    struct Slot {
        int q, n;
        bool remainder;
        Field2 band;
        double peak;
    };
    std::vector<Slot> slots;
    double maxpeak = 0.0;
    for (int n = n_lo; n <= n_hi; ++n) {
        Field2 fn = ops::vertical_coefficient(omega_z0, n);
        Field2 rem = fn;
        std::vector<Slot> row;
        for (int q = q_lo; q <= q_hi; ++q) {
            Field2 band = dyadic::delta_q(fn, q, pr);
            for (std::size_t i = 0; i < rem.v.size(); ++i) rem.v[i] -= band.v[i];
            row.push_back({q, n, false, std::move(band), 0.0});
        }
        if (opt.include_remainder)
            row.insert(row.begin(), {q_lo - 1, n, true, std::move(rem), 0.0});
        for (Slot& s : row) {
            s.peak = ops::lp_norm(s.band, ops::lp_inf);
            maxpeak = std::max(maxpeak, s.peak);
            slots.push_back(std::move(s));
        }
    }

    // Second pass: expand the members above the activity threshold.
    std::vector<DecompositionMember> out;
    out.reserve(slots.size());
    for (Slot& s : slots) {
        DecompositionMember m;
        m.q = s.q;
        m.n = s.n;
        m.remainder = s.remainder;
        m.active = s.peak > opt.active_threshold * maxpeak;
        m.has_moments = m.active && opt.with_moments;
        if (m.active) {
            Field2 w1_2d = ops::multiply_coord(s.band, 1); // y * band
            for (cplx& c : w1_2d.v) c = -c;                // w1 = -y wz
            Field2 w2_2d = ops::multiply_coord(s.band, 0); // w2 = +x wz
            m.wz = expand(s.band, g, s.n);
            m.w1 = expand(w1_2d, g, s.n);
            m.w2 = expand(w2_2d, g, s.n);
            if (m.has_moments) {
                m.mx1 = expand(ops::multiply_coord(w1_2d, 0), g, s.n);
                m.mx2 = expand(ops::multiply_coord(w2_2d, 0), g, s.n);
                m.my1 = expand(ops::multiply_coord(w1_2d, 1), g, s.n);
                m.my2 = expand(ops::multiply_coord(w2_2d, 1), g, s.n);
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

void co_evolve_step(std::vector<DecompositionMember>& members, const StageSet& s, bool dealias) {
    const double eps = 1e-9 * std::max(1.0, std::abs(s.time));
    for (DecompositionMember& m : members) {
        if (std::abs(m.time - s.time) > eps)
            throw config_error("co_evolve_step: member (q = " + std::to_string(m.q) + ", n = " +
                               std::to_string(m.n) + ") clock t = " + std::to_string(m.time) +
                               " does not match the stage set's t = " + std::to_string(s.time));
        if (m.active) rk4_member(m, s, dealias);
        m.time = s.time + s.dt;
    }
}

Reconstruction reconstruct(const std::vector<DecompositionMember>& members) {
    const DecompositionMember* lead = first_active(members);
    if (!lead) throw config_error("reconstruct: no active members");
    const GridSpec& g = lead->wz.re.grid;

    Reconstruction r;
    r.omega = VectorField3(g);
    r.has_moments = true;
    for (const DecompositionMember& m : members)
        if (m.active && !m.has_moments) r.has_moments = false;
    if (r.has_moments) {
        r.mx1 = ScalarField(g);
        r.mx2 = ScalarField(g);
        r.my1 = ScalarField(g);
        r.my2 = ScalarField(g);
    }

    const std::int64_t sz = static_cast<std::int64_t>(g.size3());
    // The members are stored winding-included, so reconstruction is the plain
    // real-part sum; the imaginary parts cancel in conjugate pairs.
    auto accumulate = [&](ScalarField& dst, const ComplexField& src) {
        double* o = dst.v.data();
        const double* re = src.re.v.data();
        par::for_n(sz, [=](std::int64_t t) { o[t] += re[t]; });
    };

    // Members are visited in list order (serial), so the sum is deterministic.
    for (const DecompositionMember& m : members) {
        if (!m.active) continue;
        require_same_grid(g, m.wz.re.grid, "reconstruct");
        accumulate(r.omega.x, m.w1);
        accumulate(r.omega.y, m.w2);
        accumulate(r.omega.z, m.wz);
        if (r.has_moments) {
            accumulate(r.mx1, m.mx1);
            accumulate(r.mx2, m.mx2);
            accumulate(r.my1, m.my1);
            accumulate(r.my2, m.my2);
        }
    }
    return r;
}

std::vector<BandDecayRow> band_decay_profile(const DecompositionMember& m,
                                             const dyadic::DyadicProfile& pr) {
    std::vector<BandDecayRow> rows;
    for (int j = pr.qmin; j <= pr.qmax; ++j) {
        BandDecayRow row;
        row.j = j;
        if (m.active) {
            auto band_sup = [&](const ComplexField& f) {
                return sup_modulus(dyadic::delta_q(f.re, j, pr), dyadic::delta_q(f.im, j, pr));
            };
            row.w1 = band_sup(m.w1);
            row.w2 = band_sup(m.w2);
            row.wz = band_sup(m.wz);
        }
        rows.push_back(row);
    }
    return rows;
}

double decay_slope(const std::vector<BandDecayRow>& rows, int q, double floor) {
    double peak = 0.0;
    for (const BandDecayRow& r : rows) peak = std::max(peak, r.wz);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!(peak > 0.0)) return nan;
    std::vector<double> d, v;
    for (const BandDecayRow& r : rows) {
        if (r.wz >= floor * peak && r.wz > 0.0) {
            d.push_back(std::abs(r.j - q));
            v.push_back(std::log2(r.wz));
        }
    }
    if (d.size() < 3) return nan;
    double dm = 0.0, vm = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        dm += d[i];
        vm += v[i];
    }
    dm /= static_cast<double>(d.size());
    vm /= static_cast<double>(d.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        num += (d[i] - dm) * (v[i] - vm);
        den += (d[i] - dm) * (d[i] - dm);
    }
    if (!(den > 0.0)) return nan;
    return num / den;
}

BesovBudget besov_budget_report(const std::vector<DecompositionMember>& members,
                                const dyadic::DyadicProfile& pr) {
    const DecompositionMember* lead = first_active(members);
    if (!lead) throw config_error("besov_budget_report: no active members");
    const GridSpec& g = lead->wz.re.grid;
    const int n_cap = g.Nz / 2 - 1;
    const int nbands = pr.qmax - pr.qmin + 1;

    // q-families present among the active members, in ascending q order
    // (the remainder family, when present, sorts first).
    std::map<int, bool> families; // q -> is_remainder
    for (const DecompositionMember& m : members)
        if (m.active) families[m.q] = m.remainder;

    BesovBudget out;
    out.time = lead->time;

    // sup_{family, n, j} = ||Delta_j S_{q, n}||_inf, and R_n accumulated
    // across families; summing the attribution over q recovers R_n exactly,
    // so the near+far tables bound the per-n totals by construction.
    std::map<int, std::vector<std::vector<double>>> sup; // q -> [n-index][j-index]
    std::vector<Field2> rn(2 * n_cap + 1, Field2(g));
    for (const auto& [fq, is_rem] : families) {
        ComplexField a(g);
        const std::int64_t sz = static_cast<std::int64_t>(g.size3());
        for (const DecompositionMember& m : members) {
            if (!m.active || m.q != fq) continue;
            double* are = a.re.v.data();
            double* aim = a.im.v.data();
            const double* re = m.wz.re.v.data();
            const double* im = m.wz.im.v.data();
            par::for_n(sz, [=](std::int64_t t) {
                are[t] += re[t];
                aim[t] += im[t];
            });
        }
        std::vector<std::vector<double>> per_n;
        for (int n = -n_cap; n <= n_cap; ++n) {
            Field2 s_qn = ops::vertical_coefficient(a.re, a.im, n);
            std::vector<double> per_j;
            for (int j = pr.qmin; j <= pr.qmax; ++j)
                per_j.push_back(ops::lp_norm(dyadic::delta_q(s_qn, j, pr), ops::lp_inf));
            per_n.push_back(std::move(per_j));
            Field2& acc = rn[static_cast<std::size_t>(n + n_cap)];
            for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += s_qn.v[i];
        }
        sup[fq] = std::move(per_n);
    }

    for (int n = -n_cap; n <= n_cap; ++n) {
        BesovBudgetRow row;
        row.n = n;
        const Field2& r = rn[static_cast<std::size_t>(n + n_cap)];
        for (int j = pr.qmin; j <= pr.qmax; ++j)
            row.total += ops::lp_norm(dyadic::delta_q(r, j, pr), ops::lp_inf);
        for (const auto& [fq, is_rem] : families) {
            const std::vector<double>& per_j = sup[fq][static_cast<std::size_t>(n + n_cap)];
            for (int jj = 0; jj < nbands; ++jj) {
                const int j = pr.qmin + jj;
                const int dist = std::abs(j - fq);
                for (int N = 1; N <= 6; ++N) {
                    if (!is_rem && dist < N)
                        row.near_part[static_cast<std::size_t>(N - 1)] += per_j[jj];
                    else
                        row.far_part[static_cast<std::size_t>(N - 1)] += per_j[jj];
                }
            }
        }
        out.grand_total += row.total;
        out.rows.push_back(row);
    }
    return out;
}

MomentConsistency moment_consistency(const DecompositionMember& m) {
    MomentConsistency out;
    if (!m.active) return out;
    const double peak =
        std::max({sup_modulus(m.w1.re, m.w1.im), sup_modulus(m.w2.re, m.w2.im),
                  sup_modulus(m.wz.re, m.wz.im)});
    if (!(peak > 0.0)) return out;

    // sup |a - s * coord * b| / peak, complex fields compared on the modulus
    auto defect = [&](const ComplexField& a, const ComplexField& b, int axis, double s) {
        ScalarField bre = ops::multiply_coord(b.re, axis);
        ScalarField bim = ops::multiply_coord(b.im, axis);
        const double* are = a.re.v.data();
        const double* aim = a.im.v.data();
        const double* xre = bre.v.data();
        const double* xim = bim.v.data();
        const double d = par::max(static_cast<std::int64_t>(a.re.v.size()), [=](std::int64_t t) {
            const double dr = are[t] - s * xre[t];
            const double di = aim[t] - s * xim[t];
            return std::sqrt(dr * dr + di * di);
        });
        return d / peak;
    };

    out.zx = defect(m.w2, m.wz, 0, +1.0); // w2 = +x wz
    out.zy = defect(m.w1, m.wz, 1, -1.0); // w1 = -y wz
    out.worst = std::max(out.zx, out.zy);
    if (m.has_moments) {
        out.mx1 = defect(m.mx1, m.w1, 0, +1.0);
        out.mx2 = defect(m.mx2, m.w2, 0, +1.0);
        out.my1 = defect(m.my1, m.w1, 1, +1.0);
        out.my2 = defect(m.my2, m.w2, 1, +1.0);
        out.worst = std::max({out.worst, out.mx1, out.mx2, out.my1, out.my2});
    }
    return out;
}

LockstepResult co_evolve(const HelicoidalState& initial,
                         std::vector<DecompositionMember>& members,
                         const evolve::SolverConfig& cfg, const LockstepSampler& sample) {
    LockstepResult out;
    HelicoidalState red = initial;
    const GridSpec& g = red.omega_z.grid;
    if (sample) sample(0, red, members);

    double t = 0.0;
    int step_idx = 0;
    const double t_eps = 1e-12 * std::max(1.0, cfg.T);
    while (t < cfg.T - t_eps) {
        const double remaining = cfg.T - t;
        const double cap = evolve::cfl_dt(red.u, g, cfg.cfl_target, remaining);
        double dt = std::min(cfg.dt, remaining);
        if (dt > cap) dt = cap;
        StageSet ss;
        ss.time = t;
        ss.dt = dt;
        try {
            int got = 0;
            HelicoidalState red_next =
                evolve::step(red, cfg, dt, [&](int si, const evolve::StageVelocity& sv) {
                    ss.stages[static_cast<std::size_t>(si)] = sv;
                    ++got;
                });
            if (got != 4)
                throw numerical_error("co_evolve: collected " + std::to_string(got) +
                                      " stage velocities instead of 4");
            if (!all_finite(red_next.omega_z) || !all_finite(red_next.u))
                throw numerical_error("non-finite value in the reduced path");
            co_evolve_step(members, ss, cfg.dealias);
            for (const DecompositionMember& m : members)
                if (m.active && !member_finite(m))
                    throw numerical_error("non-finite value in member (q = " +
                                          std::to_string(m.q) + ", n = " + std::to_string(m.n) +
                                          ")");
            red = std::move(red_next);
        } catch (const numerical_error& e) {
            out.aborted = true;
            out.abort_reason = "step to t = " + std::to_string(t + dt) + " failed: " + e.what();
            break;
        }
        t += dt;
        ++step_idx;
        if (sample) sample(step_idx, red, members);
    }
    out.final_state = std::move(red);
    out.steps = step_idx;
    return out;
}

diag::DiagnosticsSeries band_decay_csv(const std::vector<DecompositionMember>& members,
                                       const dyadic::DyadicProfile& pr, double time) {
    diag::DiagnosticsSeries s({"time", "q", "n", "j", "w1", "w2", "wz"});
    for (const DecompositionMember& m : members) {
        if (!m.active) continue;
        for (const BandDecayRow& r : band_decay_profile(m, pr))
            s.add_row({time, static_cast<double>(m.q), static_cast<double>(m.n),
                       static_cast<double>(r.j), r.w1, r.w2, r.wz});
    }
    return s;
}

diag::DiagnosticsSeries besov_budget_csv(const std::vector<BesovBudget>& budgets) {
    diag::DiagnosticsSeries s({"time", "n", "total", "near_1", "near_2", "near_3", "near_4",
                               "near_5", "near_6", "far_1", "far_2", "far_3", "far_4", "far_5",
                               "far_6"});
    for (const BesovBudget& b : budgets) {
        for (const BesovBudgetRow& r : b.rows) {
            std::vector<double> row = {b.time, static_cast<double>(r.n), r.total};
            for (double v : r.near_part) row.push_back(v);
            for (double v : r.far_part) row.push_back(v);
            s.add_row(std::move(row));
        }
    }
    return s;
}

} // namespace hlx::members

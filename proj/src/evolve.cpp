#include "hlx/evolve.hpp"

#include <cmath>
#include <string>

#include "hlx/biot_savart.hpp"
#include "hlx/dyadic.hpp"
#include "hlx/errors.hpp"
#include "hlx/fft.hpp"
#include "hlx/ops.hpp"
#include "hlx/par.hpp"

namespace hlx::evolve {

using fft::forward;
using fft::inverse;

namespace {

ScalarField axpy(const ScalarField& base, double a, const ScalarField& k) {
    ScalarField out(base.grid);
    const double* b = base.v.data();
    const double* kk = k.v.data();
    double* o = out.v.data();
    par::for_n(static_cast<std::int64_t>(out.v.size()),
               [b, kk, o, a](std::int64_t t) { o[t] = b[t] + a * kk[t]; });
    return out;
}

ScalarField rk4_combine(const ScalarField& w0, double dt, const ScalarField& k1,
                        const ScalarField& k2, const ScalarField& k3, const ScalarField& k4) {
    ScalarField out(w0.grid);
    const double c = dt / 6.0;
    const double* b = w0.v.data();
    const double* a1 = k1.v.data();
    const double* a2 = k2.v.data();
    const double* a3 = k3.v.data();
    const double* a4 = k4.v.data();
    double* o = out.v.data();
    par::for_n(static_cast<std::int64_t>(out.v.size()), [=](std::int64_t t) {
        o[t] = b[t] + c * (a1[t] + 2.0 * a2[t] + 2.0 * a3[t] + a4[t]);
    });
    return out;
}

} // namespace

ScalarField transport_tendency(const ScalarField& f, const ScalarField& utx,
                               const ScalarField& uty, bool dealias) {
    require_same_grid(f.grid, utx.grid, "transport_tendency");
    SpectralField sx = forward(ops::multiply(utx, f));
    SpectralField sy = forward(ops::multiply(uty, f));
    if (dealias) {
        ops::dealias_inplace(sx);
        ops::dealias_inplace(sy);
    }
    ops::derivative_inplace(sx, 0);
    ops::derivative_inplace(sy, 1);
    cplx* a = sx.c.data();
    const cplx* b = sy.c.data();
    par::for_n(static_cast<std::int64_t>(sx.c.size()),
               [a, b](std::int64_t t) { a[t] = -(a[t] + b[t]); });
    return inverse(sx);
}

StageVelocity stage_velocity(const ScalarField& omega_z, double div_tol) {
    helical::HelicoidalState st = helical::state_from_omega_z(omega_z, 0.0, div_tol);
    return {std::move(st.u_tilde_x), std::move(st.u_tilde_y), std::move(st.u)};
}

ScalarField rhs_reduced(const HelicoidalState& state) {
    const VectorField3 w = biot_savart::curl(state.u);
    double num = 0.0, den = 0.0;
    for (int b = 0; b < 3; ++b) {
        const double d = ops::l2_diff(w.comp(b), state.omega.comp(b));
        num += d * d;
        const double n = ops::lp_norm(state.omega.comp(b), 2);
        den += n * n;
    }
    const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    if (rel > 1e-6)
        throw numerical_error("rhs_reduced: state velocity is inconsistent with its vorticity "
                              "(relative curl defect " +
                              std::to_string(rel) + " exceeds 1e-6)");
    return transport_tendency(state.omega_z, state.u_tilde_x, state.u_tilde_y, true);
}

HelicoidalState step(const HelicoidalState& state, const SolverConfig& cfg, double dt,
                     const std::function<void(int, const StageVelocity&)>& on_stage) {
    const ScalarField& w0 = state.omega_z;

    StageVelocity sv{state.u_tilde_x, state.u_tilde_y, state.u};
    if (on_stage) on_stage(0, sv);
    ScalarField k1 = transport_tendency(w0, sv.utx, sv.uty, cfg.dealias);

    ScalarField ws = axpy(w0, 0.5 * dt, k1);
    sv = stage_velocity(ws, cfg.div_tol);
    if (on_stage) on_stage(1, sv);
    ScalarField k2 = transport_tendency(ws, sv.utx, sv.uty, cfg.dealias);

    ws = axpy(w0, 0.5 * dt, k2);
    sv = stage_velocity(ws, cfg.div_tol);
    if (on_stage) on_stage(2, sv);
    ScalarField k3 = transport_tendency(ws, sv.utx, sv.uty, cfg.dealias);

    ws = axpy(w0, dt, k3);
    sv = stage_velocity(ws, cfg.div_tol);
    if (on_stage) on_stage(3, sv);
    ScalarField k4 = transport_tendency(ws, sv.utx, sv.uty, cfg.dealias);

    return helical::state_from_omega_z(rk4_combine(w0, dt, k1, k2, k3, k4), state.time + dt,
                                       cfg.div_tol);
}

namespace {

// velocity of the full path: periodic solve plus the helical mean-drift gauge
VectorField3 full_velocity(const VectorField3& omega, double div_tol) {
    VectorField3 u = biot_savart::velocity_from_vorticity(omega, div_tol);
    const GridSpec& g = u.grid();
    const double* u1 = u.x.v.data();
    const double* u2 = u.y.v.data();
    const double* u3 = u.z.v.data();
    const double c3 = par::sum(static_cast<std::int64_t>(g.size3()),
                               [&g, u1, u2, u3](std::int64_t t) {
                                   const std::int64_t ij = t / g.Nz;
                                   const int i = static_cast<int>(ij / g.N);
                                   const int j = static_cast<int>(ij % g.N);
                                   return g.x(j) * u1[t] - g.x(i) * u2[t] - u3[t];
                               }) /
                      static_cast<double>(g.size3());
    double* u3m = u.z.v.data();
    par::for_n(static_cast<std::int64_t>(g.size3()), [u3m, c3](std::int64_t t) { u3m[t] += c3; });
    return u;
}

VectorField3 full_tendency(const VectorField3& omega, const VectorField3& u, bool dealias) {
    const GridSpec& g = omega.grid();
    // all nine spectral derivatives of each of u and omega
    SpectralField su[3] = {forward(u.x), forward(u.y), forward(u.z)};
    SpectralField sw[3] = {forward(omega.x), forward(omega.y), forward(omega.z)};
    ScalarField du[3][3], dw[3][3]; // [component][axis]
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) {
            SpectralField tu = su[b];
            ops::derivative_inplace(tu, a);
            du[b][a] = inverse(tu);
            SpectralField tw = sw[b];
            ops::derivative_inplace(tw, a);
            dw[b][a] = inverse(tw);
        }
    VectorField3 out(g);
    for (int b = 0; b < 3; ++b) {
        ScalarField acc(g);
        double* o = acc.v.data();
        for (int a = 0; a < 3; ++a) {
            const double* ua = u.comp(a).v.data();
            const double* dwa = dw[b][a].v.data();
            const double* wa = omega.comp(a).v.data();
            const double* dua = du[b][a].v.data();
            par::for_n(static_cast<std::int64_t>(g.size3()), [o, ua, dwa, wa, dua](std::int64_t t) {
                o[t] += -ua[t] * dwa[t] + wa[t] * dua[t];
            });
        }
        if (dealias) {
            SpectralField s = forward(acc);
            ops::dealias_inplace(s);
            out.comp(b) = inverse(s);
        } else {
            out.comp(b) = std::move(acc);
        }
    }
    return out;
}

VectorField3 vaxpy(const VectorField3& base, double a, const VectorField3& k) {
    VectorField3 out(base.grid());
    for (int b = 0; b < 3; ++b) out.comp(b) = axpy(base.comp(b), a, k.comp(b));
    return out;
}

} // namespace

VectorField3 rhs_full3d(const VectorField3& omega, double div_tol) {
    return full_tendency(omega, full_velocity(omega, div_tol), true);
}

VectorField3 step_full3d(const VectorField3& omega, const SolverConfig& cfg, double dt) {
    VectorField3 k1 = full_tendency(omega, full_velocity(omega, cfg.div_tol), cfg.dealias);
    VectorField3 w2 = vaxpy(omega, 0.5 * dt, k1);
    VectorField3 k2 = full_tendency(w2, full_velocity(w2, cfg.div_tol), cfg.dealias);
    VectorField3 w3 = vaxpy(omega, 0.5 * dt, k2);
    VectorField3 k3 = full_tendency(w3, full_velocity(w3, cfg.div_tol), cfg.dealias);
    VectorField3 w4 = vaxpy(omega, dt, k3);
    VectorField3 k4 = full_tendency(w4, full_velocity(w4, cfg.div_tol), cfg.dealias);
    VectorField3 out(omega.grid());
    for (int b = 0; b < 3; ++b)
        out.comp(b) = rk4_combine(omega.comp(b), dt, k1.comp(b), k2.comp(b), k3.comp(b),
                                  k4.comp(b));
    biot_savart::project_divergence_free(out);
    return out;
}

double cfl_dt(const VectorField3& u, const GridSpec& g, double cfl_target, double remaining) {
    helical::EffectiveVelocity ev = helical::effective_velocity(u);
    const double vt = std::max(ops::lp_norm(ev.ux, ops::lp_inf), ops::lp_norm(ev.uy, ops::lp_inf));
    const double v3 = ops::lp_norm(u, ops::lp_inf);
    const double vmax = std::max(vt, v3);
    if (!(vmax > 0.0)) return remaining;
    return std::min(cfl_target * g.hx() / vmax, remaining);
}

std::vector<std::string> diagnostics_schema(RunMode mode) {
    std::vector<std::string> s = {
        "time",           "dt",
        "dt_capped",      "wz_l1",
        "wz_l2",          "wz_linf",
        "omega_l2",       "omega_linf",
        "xy_omega_linf",  "u_l2",
        "u_linf",         "xy_u_l2",
        "u_moment_l2",    "radial_moment",
        "orthogonality_defect", "omega_r_rel",
        "div_omega_rel",  "div_u_rel",
        "boundary_mass",  "bkm_integral",
        "besov_wz_b21",   "besov_wz_binf1",
        "besov_xyw_binf1"};
    if (mode == RunMode::both) {
        s.push_back("reduced_vs_full");
        s.push_back("full_omega_r_rel");
        s.push_back("full_radial_moment_rel");
    }
    return s;
}

namespace {

struct StateMetrics {
    double wz_l1, wz_l2, wz_linf, omega_l2, omega_linf, xy_omega_linf;
    double u_l2, u_linf, xy_u_l2, u_moment_l2;
    double radial_moment, orthogonality_defect, omega_r_rel;
    double div_omega_rel, div_u_rel, boundary_mass;
    double besov_wz_b21, besov_wz_binf1, besov_xyw_binf1;
};

double omega_r_rel_of(const VectorField3& omega) {
    helical::CylindricalComponents cc = helical::cylindrical_components(omega);
    const double wr = ops::lp_norm(cc.vr, ops::lp_inf);
    const double wn = ops::lp_norm(omega, ops::lp_inf);
    return wn > 0.0 ? wr / wn : 0.0;
}

StateMetrics measure(const ScalarField& wz, const VectorField3& omega, const VectorField3& u,
                     const dyadic::DyadicProfile& pr) {
    StateMetrics m{};
    m.wz_l1 = ops::lp_norm(wz, 1);
    m.wz_l2 = ops::lp_norm(wz, 2);
    m.wz_linf = ops::lp_norm(wz, ops::lp_inf);
    m.omega_l2 = ops::lp_norm(omega, 2);
    m.omega_linf = ops::lp_norm(omega, ops::lp_inf);
    double xyw = 0.0;
    for (int b = 0; b < 3; ++b)
        for (int ax = 0; ax < 2; ++ax)
            xyw = std::max(xyw,
                           ops::lp_norm(ops::multiply_coord(omega.comp(b), ax), ops::lp_inf));
    m.xy_omega_linf = xyw;
    m.u_l2 = ops::lp_norm(u, 2);
    m.u_linf = ops::lp_norm(u, ops::lp_inf);
    double xyu2 = 0.0;
    for (int b = 0; b < 3; ++b)
        for (int ax = 0; ax < 2; ++ax) {
            const double n = ops::lp_norm(ops::multiply_coord(u.comp(b), ax), 2);
            xyu2 += n * n;
        }
    m.xy_u_l2 = std::sqrt(xyu2);
    m.u_moment_l2 = std::sqrt(m.u_l2 * m.u_l2 + xyu2);
    m.radial_moment = helical::radial_moment(omega);
    m.orthogonality_defect = helical::orthogonality_defect(u);
    m.omega_r_rel = omega_r_rel_of(omega);
    m.div_omega_rel = biot_savart::divergence_rel_l2(omega);
    m.div_u_rel = biot_savart::divergence_rel_l2(u);
    m.boundary_mass = ops::boundary_mass_fraction(wz);
    const dyadic::BesovParams b21{0.0, 2, 1};
    const dyadic::BesovParams binf1{0.0, ops::lp_inf, 1};
    m.besov_wz_b21 = dyadic::hybrid_besov_norm(wz, b21, pr).value;
    m.besov_wz_binf1 = dyadic::hybrid_besov_norm(wz, binf1, pr).value;
    m.besov_xyw_binf1 = dyadic::hybrid_besov_norm(ops::multiply_coord(wz, 0), binf1, pr).value +
                        dyadic::hybrid_besov_norm(ops::multiply_coord(wz, 1), binf1, pr).value;
    return m;
}

} // namespace

Trajectory run(const HelicoidalState& initial, const SolverConfig& cfg, RunMode mode,
               const SnapshotSink& sink) {
    if (!(cfg.dt > 0.0)) throw config_error("solver: dt must be positive");
    if (!(cfg.T >= 0.0)) throw config_error("solver: T must be nonnegative");
    if (!(cfg.cfl_target > 0.0)) throw config_error("solver: cfl_target must be positive");

    const GridSpec& g = initial.omega_z.grid;
    const dyadic::DyadicProfile pr = dyadic::default_partition(g);
    const bool want_red = mode != RunMode::full3d;
    const bool want_full = mode != RunMode::reduced;

    Trajectory tr;
    tr.diags = diag::DiagnosticsSeries(diagnostics_schema(mode));

    HelicoidalState red = initial;
    VectorField3 full_w = initial.omega;
    VectorField3 full_u = initial.u;

    const double wz0_l2 = ops::lp_norm(initial.omega_z, 2);
    double bkm = 0.0;
    double prev_winf = ops::lp_norm(want_red ? red.omega : full_w, ops::lp_inf);

    auto record = [&](double t, double dt, int capped) {
        const ScalarField& wz = want_red ? red.omega_z : full_w.z;
        const VectorField3& om = want_red ? red.omega : full_w;
        const VectorField3& uu = want_red ? red.u : full_u;
        StateMetrics m = measure(wz, om, uu, pr);
        std::vector<double> row = {t,
                                   dt,
                                   static_cast<double>(capped),
                                   m.wz_l1,
                                   m.wz_l2,
                                   m.wz_linf,
                                   m.omega_l2,
                                   m.omega_linf,
                                   m.xy_omega_linf,
                                   m.u_l2,
                                   m.u_linf,
                                   m.xy_u_l2,
                                   m.u_moment_l2,
                                   m.radial_moment,
                                   m.orthogonality_defect,
                                   m.omega_r_rel,
                                   m.div_omega_rel,
                                   m.div_u_rel,
                                   m.boundary_mass,
                                   bkm,
                                   m.besov_wz_b21,
                                   m.besov_wz_binf1,
                                   m.besov_xyw_binf1};
        if (mode == RunMode::both) {
            const double dv = ops::l2_diff(red.omega_z, full_w.z);
            row.push_back(wz0_l2 > 0.0 ? dv / wz0_l2 : dv);
            row.push_back(omega_r_rel_of(full_w));
            const double fwn = ops::lp_norm(full_w, ops::lp_inf);
            row.push_back(fwn > 0.0 ? helical::radial_moment(full_w) / fwn : 0.0);
        }
        tr.diags.add_row(std::move(row));
    };

    record(0.0, 0.0, 0);
    if (sink && want_red) sink(0, red);

    double t = 0.0;
    int step_idx = 0;
    const double t_eps = 1e-12 * std::max(1.0, cfg.T);
    while (t < cfg.T - t_eps) {
        const double remaining = cfg.T - t;
        const VectorField3& u_cfl = want_red ? red.u : full_u;
        const double cap = cfl_dt(u_cfl, g, cfg.cfl_target, remaining);
        double dt = std::min(cfg.dt, remaining);
        int capped = 0;
        if (dt > cap) {
            dt = cap;
            capped = 1;
        }
        try {
            HelicoidalState red_next;
            VectorField3 full_next, full_u_next;
            if (want_red) red_next = step(red, cfg, dt);
            if (want_full) {
                full_next = step_full3d(full_w, cfg, dt);
                full_u_next = full_velocity(full_next, cfg.div_tol);
            }
            if (want_red && (!all_finite(red_next.omega_z) || !all_finite(red_next.u)))
                throw numerical_error("non-finite value in the reduced path");
            if (want_full && (!all_finite(full_next) || !all_finite(full_u_next)))
                throw numerical_error("non-finite value in the full-3D path");
            if (want_red) red = std::move(red_next);
            if (want_full) {
                full_w = std::move(full_next);
                full_u = std::move(full_u_next);
            }
        } catch (const numerical_error& e) {
            tr.aborted = true;
            tr.abort_reason = "step to t = " + std::to_string(t + dt) + " failed: " + e.what();
            break;
        }
        t += dt;
        ++step_idx;
        const double winf = ops::lp_norm(want_red ? red.omega : full_w, ops::lp_inf);
        bkm += 0.5 * dt * (prev_winf + winf);
        prev_winf = winf;
        record(t, dt, capped);
        if (sink && want_red &&
            ((cfg.snapshot_every > 0 && step_idx % cfg.snapshot_every == 0) ||
             !(t < cfg.T - t_eps)))
            sink(step_idx, red);
    }

    tr.t_end = t;
    tr.bkm_integral = bkm;
    tr.has_reduced = want_red;
    tr.has_full = want_full;
    if (want_red) tr.final_reduced = std::move(red);
    if (want_full) {
        tr.final_full_omega = std::move(full_w);
        tr.final_full_u = std::move(full_u);
    }
    return tr;
}

} // namespace hlx::evolve

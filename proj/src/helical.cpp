#include "hlx/helical.hpp"

#include <cmath>
#include <string>

#include "hlx/biot_savart.hpp"
#include "hlx/errors.hpp"
#include "hlx/ops.hpp"
#include "hlx/par.hpp"

namespace hlx::helical {

namespace {

// phi(t) = exp(-1/t) for t > 0 (zero otherwise) and its first two derivatives
struct D2 {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};

D2 phi2(double t) {
    if (t <= 1e-3) return {}; // exp(-1000) underflows anyway
    const double e = std::exp(-1.0 / t);
    const double t2 = t * t;
    return {e, e / t2, e * (1.0 - 2.0 * t) / (t2 * t2)};
}

// C^infinity step: 0 for t <= 0, 1 for t >= 1
D2 step2(double t) {
    if (t <= 0.0) return {};
    if (t >= 1.0) return {1.0, 0.0, 0.0};
    const D2 p = phi2(t);
    const D2 q = phi2(1.0 - t); // psi = phi(1-t): psi' = -q.d1, psi'' = q.d2
    const double den = p.v + q.v;
    const double n1 = p.d1 * q.v + p.v * q.d1; // p' psi - p psi'
    const double dden = p.d1 - q.d1;
    D2 s;
    s.v = p.v / den;
    s.d1 = n1 / (den * den);
    s.d2 = (p.d2 * q.v - p.v * q.d2) / (den * den) - 2.0 * n1 * dden / (den * den * den);
    return s;
}

// bump and two derivatives at once
D2 bump2(double s) {
    const double a = std::abs(s);
    if (a >= bump_support) return {};
    const double g = std::exp(-s * s);
    const double g1 = -2.0 * s * g;
    const double g2 = (4.0 * s * s - 2.0) * g;
    const double inv = 1.0 / (bump_support - bump_flat);
    const D2 t = step2((bump_support - a) * inv);
    const double sg = (s >= 0.0) ? 1.0 : -1.0;
    const double t1 = -sg * inv * t.d1;
    const double t2 = inv * inv * t.d2;
    return {g * t.v, g1 * t.v + g * t1, g2 * t.v + 2.0 * g1 * t1 + g * t2};
}

} // namespace

double bump(double s) { return bump2(s).v; }
double dbump(double s) { return bump2(s).d1; }
double d2bump(double s) { return bump2(s).d2; }

namespace {

void check_term(const HelicalTerm& t, double L) {
    if (t.amplitude == 0.0) return;
    if (t.m < 0) throw config_error("helical term: harmonic index m must be >= 0");
    if (!(t.width > 0.0)) throw config_error("helical term: width must be positive");
    const double rad = bump_support * t.width;
    if (t.m == 0 && t.center < rad)
        throw config_error(
            "helical term: an m = 0 shape divides by r, so its support must stay "
            "off the axis (center >= " +
            std::to_string(bump_support) + " * width)");
    // r^m tames the axis for m >= 1, but only where the window has already
    // decayed: require exp(-(center/width)^2) below working precision
    if (t.m >= 1 && t.center < 4.8 * t.width)
        throw config_error("helical term: support must clear the axis (center >= 4.8 * width)");
    if (t.center + rad > 0.5 * L)
        throw config_error("helical term: support [" + std::to_string(t.center - rad) + ", " +
                           std::to_string(t.center + rad) +
                           "] leaves r <= L/2 = " + std::to_string(0.5 * L));
}

void check_profile(const HelicoidalProfile& p, double L) {
    if (p.pitch != 1) throw config_error("only pitch 1 is implemented");
    for (const HelicalTerm& t : p.terms) check_term(t, L);
}

} // namespace

double radial_shape(const HelicalTerm& t, double r) {
    const double s = (r - t.center) / t.width;
    if (t.m >= 1) return std::pow(r, t.m) * bump(s);
    // (1/r) d/dr (r B): the vorticity of the swirl u_theta = B. Support
    // excludes the axis, so r > 0 wherever the bump is nonzero.
    const D2 b = bump2(s);
    if (b.v == 0.0 && b.d1 == 0.0) return 0.0;
    return b.d1 / t.width + b.v / r;
}

double profile_value(const HelicoidalProfile& p, double r, double zeta) {
    double g = 0.0;
    for (const HelicalTerm& t : p.terms) {
        if (t.amplitude == 0.0) continue;
        g += t.amplitude * radial_shape(t, r) * std::cos(t.m * zeta + t.phase);
    }
    return g;
}

double axisym_u_theta(const HelicoidalProfile& p, double r) {
    double ut = 0.0;
    for (const HelicalTerm& t : p.terms) {
        if (t.m != 0 || t.amplitude == 0.0) continue;
        ut += t.amplitude * std::cos(t.phase) * bump((r - t.center) / t.width);
    }
    return ut;
}

double axisym_u_z(const HelicoidalProfile& p, double r) { return -r * axisym_u_theta(p, r); }

double axisym_omega_z(const HelicoidalProfile& p, double r) {
    double wz = 0.0;
    for (const HelicalTerm& t : p.terms) {
        if (t.m != 0 || t.amplitude == 0.0) continue;
        wz += t.amplitude * std::cos(t.phase) * radial_shape(t, r);
    }
    return wz;
}

VectorField3 assemble_omega(const ScalarField& omega_z) {
    const GridSpec& g = omega_z.grid;
    VectorField3 w(g);
    const double* wz = omega_z.v.data();
    double* w1 = w.x.v.data();
    double* w2 = w.y.v.data();
    double* w3 = w.z.v.data();
    par::for_n(static_cast<std::int64_t>(g.size3()), [&g, wz, w1, w2, w3](std::int64_t t) {
        const std::int64_t ij = t / g.Nz;
        const int i = static_cast<int>(ij / g.N);
        const int j = static_cast<int>(ij % g.N);
        w1[t] = -g.x(j) * wz[t]; // y coordinate is the second index
        w2[t] = g.x(i) * wz[t];
        w3[t] = wz[t];
    });
    return w;
}

double radial_moment(const VectorField3& omega) {
    const GridSpec& g = omega.grid();
    const double* w1 = omega.x.v.data();
    const double* w2 = omega.y.v.data();
    return par::max(static_cast<std::int64_t>(g.size3()), [&g, w1, w2](std::int64_t t) {
        const std::int64_t ij = t / g.Nz;
        const int i = static_cast<int>(ij / g.N);
        const int j = static_cast<int>(ij % g.N);
        return std::abs(g.x(i) * w1[t] + g.x(j) * w2[t]);
    });
}

double orthogonality_defect(const VectorField3& u) {
    const GridSpec& g = u.grid();
    const double* u1 = u.x.v.data();
    const double* u2 = u.y.v.data();
    const double* u3 = u.z.v.data();
    return par::max(static_cast<std::int64_t>(g.size3()), [&g, u1, u2, u3](std::int64_t t) {
        const std::int64_t ij = t / g.Nz;
        const int i = static_cast<int>(ij / g.N);
        const int j = static_cast<int>(ij % g.N);
        return std::abs(-g.x(j) * u1[t] + g.x(i) * u2[t] + u3[t]);
    });
}

EffectiveVelocity effective_velocity(const VectorField3& u) {
    const GridSpec& g = u.grid();
    EffectiveVelocity ev{ScalarField(g), ScalarField(g)};
    const double* u1 = u.x.v.data();
    const double* u2 = u.y.v.data();
    const double* u3 = u.z.v.data();
    double* ex = ev.ux.v.data();
    double* ey = ev.uy.v.data();
    par::for_n(static_cast<std::int64_t>(g.size3()), [&g, u1, u2, u3, ex, ey](std::int64_t t) {
        const std::int64_t ij = t / g.Nz;
        const int i = static_cast<int>(ij / g.N);
        const int j = static_cast<int>(ij % g.N);
        ex[t] = u1[t] + g.x(j) * u3[t];
        ey[t] = u2[t] - g.x(i) * u3[t];
    });
    return ev;
}

CylindricalComponents cylindrical_components(const VectorField3& v) {
    const GridSpec& g = v.grid();
    CylindricalComponents cc{ScalarField(g), ScalarField(g), ScalarField(g)};
    const double rmin = 0.5 * g.hx();
    const double* v1 = v.x.v.data();
    const double* v2 = v.y.v.data();
    const double* v3 = v.z.v.data();
    double* vr = cc.vr.v.data();
    double* vt = cc.vtheta.v.data();
    double* vz = cc.vz.v.data();
    par::for_n(static_cast<std::int64_t>(g.size3()),
               [&g, rmin, v1, v2, v3, vr, vt, vz](std::int64_t t) {
                   const std::int64_t ij = t / g.Nz;
                   const int i = static_cast<int>(ij / g.N);
                   const int j = static_cast<int>(ij % g.N);
                   const double x = g.x(i), y = g.x(j);
                   const double r = std::hypot(x, y);
                   if (r < rmin) {
                       vr[t] = 0.0;
                       vt[t] = 0.0;
                   } else {
                       vr[t] = (x * v1[t] + y * v2[t]) / r;
                       vt[t] = (-y * v1[t] + x * v2[t]) / r;
                   }
                   vz[t] = v3[t];
               });
    return cc;
}

namespace {

// sup |d_a v_b| over all nine spectral derivatives
double grad_linf(const VectorField3& v) {
    double m = 0.0;
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a)
            m = std::max(m, ops::lp_norm(ops::partial_derivative(v.comp(b), a), ops::lp_inf));
    return m;
}

} // namespace

HelicoidalState state_from_omega_z(ScalarField omega_z, double time, double div_tol) {
    const GridSpec g = omega_z.grid;
    HelicoidalState st;
    st.omega_z = std::move(omega_z);
    st.omega = assemble_omega(st.omega_z);
    st.u = biot_savart::velocity_from_vorticity(st.omega, div_tol);

    // The periodic solve fixes mean(u) = 0, but a helical flow decaying at
    // horizontal infinity carries a definite mean vertical drift; restore it
    // from the zero mode of the identity u3 = y u1 - x u2.
    {
        const double* u1 = st.u.x.v.data();
        const double* u2 = st.u.y.v.data();
        const double* u3 = st.u.z.v.data();
        const double c3 =
            par::sum(static_cast<std::int64_t>(g.size3()),
                     [&g, u1, u2, u3](std::int64_t t) {
                         const std::int64_t ij = t / g.Nz;
                         const int i = static_cast<int>(ij / g.N);
                         const int j = static_cast<int>(ij % g.N);
                         return g.x(j) * u1[t] - g.x(i) * u2[t] - u3[t];
                     }) /
            static_cast<double>(g.size3());
        double* u3m = st.u.z.v.data();
        par::for_n(static_cast<std::int64_t>(g.size3()),
                   [u3m, c3](std::int64_t t) { u3m[t] += c3; });
    }

    EffectiveVelocity ev = effective_velocity(st.u);
    st.u_tilde_x = std::move(ev.ux);
    st.u_tilde_y = std::move(ev.uy);
    st.time = time;
    return st;
}

HelicoidalState generate_initial_data(const HelicoidalProfile& p, const GridSpec& g,
                                      InitReport* report) {
    g.validate();
    check_profile(p, g.L);

    ScalarField wz_field(g);
    double* wz = wz_field.v.data();
    par::for_n(static_cast<std::int64_t>(g.size3()), [&g, &p, wz](std::int64_t t) {
        const std::int64_t ij = t / g.Nz;
        const int i = static_cast<int>(ij / g.N);
        const int j = static_cast<int>(ij % g.N);
        const int k = static_cast<int>(t % g.Nz);
        const double x = g.x(i), y = g.x(j);
        const double r = std::hypot(x, y);
        const double theta = (r == 0.0) ? 0.0 : std::atan2(y, x);
        wz[t] = profile_value(p, r, g.z(k) - theta);
    });

    const double div_rel = biot_savart::divergence_rel_l2(assemble_omega(wz_field));
    if (div_rel > 1e-8)
        throw config_error("profile produces inconsistent vorticity: relative divergence " +
                           std::to_string(div_rel) + " exceeds 1e-8");

    HelicoidalState st = state_from_omega_z(std::move(wz_field), 0.0, 1e-8);

    if (report) {
        InitReport r;
        r.omega_z_linf = ops::lp_norm(st.omega_z, ops::lp_inf);
        r.div_omega_rel = div_rel;
        r.div_omega_rel_linf = biot_savart::divergence_rel_linf(st.omega);
        r.radial_moment = radial_moment(st.omega);
        r.orthogonality_defect = orthogonality_defect(st.u);
        const double u_linf = ops::lp_norm(st.u, ops::lp_inf);
        r.orthogonality_rel = u_linf > 0.0 ? r.orthogonality_defect / u_linf : 0.0;
        const double gu = grad_linf(st.u);
        const ScalarField hdiv_x = ops::partial_derivative(st.u_tilde_x, 0);
        const ScalarField hdiv_y = ops::partial_derivative(st.u_tilde_y, 1);
        double hd = 0.0;
        for (std::size_t t = 0; t < hdiv_x.v.size(); ++t)
            hd = std::max(hd, std::abs(hdiv_x.v[t] + hdiv_y.v[t]));
        r.horiz_div_rel = gu > 0.0 ? hd / gu : 0.0;
        r.div_u_rel = biot_savart::divergence_rel_l2(st.u);
        r.boundary_mass = ops::boundary_mass_fraction(st.omega_z);
        const double e_total = std::pow(ops::lp_norm(st.omega_z, 2), 2);
        const double twopi = 2.0 * std::acos(-1.0);
        const double e0 =
            twopi * std::pow(ops::lp_norm(ops::vertical_coefficient(st.omega_z, 0), 2), 2);
        r.n_nonzero_energy_frac =
            e_total > 0.0 ? std::max(0.0, (e_total - e0) / e_total) : 0.0;
        *report = r;
    }
    return st;
}

HelicoidalProfile default_profile() {
    HelicoidalProfile p;
    // m = 1 ring pair; the second amplitude is -1.441437014021 times the
    // first, the ratio (frozen from a least-squares fit, scale-invariant)
    // at which the two rings' far-field velocities cancel so the periodic
    // images do not pollute u.h = 0.
    p.terms.push_back({1, 0.20, 0.0, 1.45, 0.30});
    p.terms.push_back({1, -0.288287402804, 0.0, 1.35, 0.28});
    // axisymmetric backbone: advects the pair without cascading itself
    p.terms.push_back({0, 0.24, 0.0, 1.55, 0.28});
    return p;
}

} // namespace hlx::helical

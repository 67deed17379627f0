#pragma once

#include <vector>

#include "hlx/grid.hpp"

// Helical-flow geometry with unit pitch: initial vorticity profiles that are
// constant along the helices z = z0 + theta, the structural identities such
// fields satisfy (zero radial moment, velocity orthogonal to the helical
// direction h = r e_theta + e_z), the effective horizontal advecting
// velocity, and Cartesian/cylindrical conversions.

namespace hlx::helical {

// One separable term a * rho_m(r) * cos(m*zeta + phase), zeta = z - theta.
//   m >= 1: rho_m(r) = r^m * bump((r - center)/width), smooth at the axis.
//   m == 0: rho_0(r) = B'(r) + B(r)/r with B(r) = bump((r - center)/width),
//           i.e. (1/r) d/dr (r B): the swirl it induces is u_theta = B itself,
//           so the whole velocity field (u_theta = B, u_z = -r B, u_r = 0) is
//           compactly supported and serves as a closed-form steady oracle.
struct HelicalTerm {
    int m = 0;
    double amplitude = 0.0;
    double phase = 0.0;
    double center = 1.55;
    double width = 0.28;
};

struct HelicoidalProfile {
    std::vector<HelicalTerm> terms;
    int pitch = 1; // reserved; only pitch 1 is implemented
};

// Radial window: Gaussian core exp(-s^2) times a C^infinity cutoff that is 1
// on |s| <= bump_flat and 0 outside |s| >= bump_support. Compactly supported,
// yet its Fourier tail is Gaussian-small at moderate resolution (the classic
// exp(-1/(1-s^2)) bump needs several hundred points across its support before
// its tail drops below 1e-8; this one needs ~25).
inline constexpr double bump_flat = 4.5;
inline constexpr double bump_support = 5.5;
double bump(double s);
double dbump(double s);
double d2bump(double s);

// radial factor of one term
double radial_shape(const HelicalTerm& t, double r);
// g(r, zeta) = sum of terms
double profile_value(const HelicoidalProfile& p, double r, double zeta);

// Closed-form cylindrical velocity generated by the m = 0 terms alone:
// u_theta(r) = sum a0 cos(phase) B(r), u_z(r) = -r * u_theta(r), u_r = 0.
// Exact steady solution used as an oracle for the elliptic solve and the
// stepper.
double axisym_u_theta(const HelicoidalProfile& p, double r);
double axisym_u_z(const HelicoidalProfile& p, double r);
double axisym_omega_z(const HelicoidalProfile& p, double r);

struct HelicoidalState {
    ScalarField omega_z;
    VectorField3 omega; // (-y w_z, x w_z, w_z)
    VectorField3 u;
    ScalarField u_tilde_x; // u1 + y u3
    ScalarField u_tilde_y; // u2 - x u3
    double time = 0.0;
};

// Consolidates a vertical-vorticity field into a full state: assembles omega,
// solves for the velocity (divergence precondition div_tol), restores the
// mean vertical drift a decaying helical flow carries (the periodic solve
// gauges it to zero), and builds the effective advecting velocity.
HelicoidalState state_from_omega_z(ScalarField omega_z, double time, double div_tol = 1e-8);

struct InitReport {
    double omega_z_linf = 0.0;
    double div_omega_rel = 0.0;       // ||div w||_2 / ||grad w||_2
    double div_omega_rel_linf = 0.0;  // same in sup norms
    double radial_moment = 0.0;
    double orthogonality_defect = 0.0;
    double orthogonality_rel = 0.0;   // defect / ||u||_inf
    double horiz_div_rel = 0.0;       // ||div_h u_tilde||_inf / ||grad u||_inf
    double div_u_rel = 0.0;
    double boundary_mass = 0.0;       // fraction of |w_z| mass at |x|,|y| > 3L/4
    double n_nonzero_energy_frac = 0.0; // vertical-mode energy outside n = 0
};

// Samples w_z = g(r, z - theta), assembles w = (-y w_z, x w_z, w_z), solves
// for u, fixes the free constant of u3 so the helical identity
// u3 = y u1 - x u2 holds in the spatial mean (the decaying-far-field gauge),
// and builds the effective velocity. Fails if the profile support leaves
// r <= L/2 or the sampled vorticity is not divergence-free to tolerance.
HelicoidalState generate_initial_data(const HelicoidalProfile& p, const GridSpec& g,
                                      InitReport* report = nullptr);

// Reference three-term profile used by bundled configs and the verification
// harness: an axisymmetric backbone carrying most of the amplitude plus an
// m = 1 ring pair whose amplitudes are balanced so their far-field velocity
// contributions cancel (keeps periodic-image contamination of the velocity
// identity u.h = 0 near machine precision). Peak |w_z| is 0.98 on the
// reference box L = 2*pi. The m = 1 content is kept deliberately small:
// m = 0 advection only rephases the helical angle, while m = 1 modes
// self-interact and cascade energy to vertical harmonics the reference
// Nz = 8 grid cannot hold, at a rate that grows with their amplitude.
HelicoidalProfile default_profile();

// || x w1 + y w2 ||_inf — identically zero for helical vorticity
double radial_moment(const VectorField3& omega);

// || -y u1 + x u2 + u3 ||_inf = || r u_theta + u_z ||_inf — the u . h defect
double orthogonality_defect(const VectorField3& u);

struct EffectiveVelocity {
    ScalarField ux; // u1 + y u3
    ScalarField uy; // u2 - x u3
};
EffectiveVelocity effective_velocity(const VectorField3& u);

struct CylindricalComponents {
    ScalarField vr;
    ScalarField vtheta;
    ScalarField vz;
};
// v_r = (x v1 + y v2)/r, v_theta = (-y v1 + x v2)/r; both zeroed on r < h/2
CylindricalComponents cylindrical_components(const VectorField3& v);

// Rebuild the helical vorticity vector from its vertical component.
VectorField3 assemble_omega(const ScalarField& omega_z);

} // namespace hlx::helical

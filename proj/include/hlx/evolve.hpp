#pragma once

#include <functional>
#include <string>

#include "hlx/diagnostics.hpp"
#include "hlx/grid.hpp"
#include "hlx/helical.hpp"

// Time integration of the helicoidal flow. Two paths share one clock: the
// reduced scalar transport of omega_z by the effective velocity (primary),
// and the full 3D vorticity-form equation (oracle). Fixed-step RK4 with a
// CFL cap; velocities are re-solved from vorticity at every stage.

namespace hlx::evolve {

using helical::HelicoidalState;

enum class RunMode { reduced, full3d, both };

struct SolverConfig {
    double dt = 0.03125;     // accepted steps never exceed the CFL bound
    double T = 1.0;
    double cfl_target = 0.5;
    bool dealias = true;     // anti-alias quadratic products (ops::dealias_inplace)
    int snapshot_every = 0;  // 0: only initial/final reach the callback
    // divergence tolerance for velocity solves along the trajectory. The
    // square box breaks helical symmetry at the periodic-image level, so the
    // assembled vorticity picks up an O(1e-3 * t) divergence defect that the
    // solve projects away; the gate is a crash guard above that scale, while
    // the diagnostics record the actual drift. Generation keeps 1e-8.
    double div_tol = 5e-3;
};

// Advecting fields of one RK stage, shared by the main unknown and any
// co-evolved passengers (the decomposition members integrate in lockstep
// against exactly these).
struct StageVelocity {
    ScalarField utx, uty; // effective horizontal velocity
    VectorField3 u;
};

// -d/dx(utx f) - d/dy(uty f); the divergence form pairs each derivative with
// the direction in which its coefficient is periodic (utx = u1 + y u3 is
// periodic in x, uty = u2 - x u3 in y), so no coordinate jump is ever
// differentiated while the advected field keeps its support off the boundary.
ScalarField transport_tendency(const ScalarField& f, const ScalarField& utx,
                               const ScalarField& uty, bool dealias);

// Builds the stage velocity for a given omega_z (assemble, solve, gauge).
StageVelocity stage_velocity(const ScalarField& omega_z, double div_tol);

// Tendency of omega_z for a consistent state (curl u = omega to 1e-6
// relative, else numerical_error).
ScalarField rhs_reduced(const HelicoidalState& state);

// Full 3D tendency -(u.grad)omega + (omega.grad)u with spectral derivatives
// and dealiased products; u is re-solved from omega.
VectorField3 rhs_full3d(const VectorField3& omega, double div_tol = 1e-8);

// One RK4 step of the reduced path. on_stage, when set, receives each stage
// index (0..3) with the velocity used, before the stage tendency is applied.
HelicoidalState step(const HelicoidalState& state, const SolverConfig& cfg, double dt,
                     const std::function<void(int, const StageVelocity&)>& on_stage = {});

// One RK4 step of the full-3D path; the result is re-projected onto
// divergence-free fields.
VectorField3 step_full3d(const VectorField3& omega, const SolverConfig& cfg, double dt);

// cfl_target * h / max(|u_tilde|, |u|) clamped to the remaining time;
// remaining for zero velocity.
double cfl_dt(const VectorField3& u, const GridSpec& g, double cfl_target, double remaining);

struct Trajectory {
    diag::DiagnosticsSeries diags; // one row per accepted step (plus t=0)
    HelicoidalState final_reduced; // valid when mode != full3d
    VectorField3 final_full_omega; // valid when mode != reduced
    VectorField3 final_full_u;
    bool has_reduced = false;
    bool has_full = false;
    bool aborted = false;          // non-finite value appeared; fields hold
    std::string abort_reason;      // the last good step
    double t_end = 0.0;
    double bkm_integral = 0.0;     // running integral of |omega|_inf dt
};

// Optional observer: called with the state after every accepted reduced-path
// step whose index is a multiple of snapshot_every (and at t=0 and t=T).
using SnapshotSink = std::function<void(int step, const HelicoidalState&)>;

Trajectory run(const HelicoidalState& initial, const SolverConfig& cfg, RunMode mode,
               const SnapshotSink& sink = {});

// Fixed diagnostics schema for a run of the given mode.
std::vector<std::string> diagnostics_schema(RunMode mode);

} // namespace hlx::evolve

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "hlx/diagnostics.hpp"
#include "hlx/dyadic.hpp"
#include "hlx/evolve.hpp"
#include "hlx/grid.hpp"

// Frequency-localized co-evolution: the vorticity is split at t = 0 into
// members indexed by a horizontal dyadic band q and a vertical mode n, and
// every member is advanced passively by the same transport scheme and the
// same stage velocities as the main unknown. Because the member system is
// linear in the member fields for a given velocity, the sum of the members
// reproduces the main run to roundoff, while each member's band content can
// be tracked individually.
//
// Representation: members are stored z-collocated. The complex pair
// (re_a, im_a) of a component holds the product (coefficient) e^{inz}
// directly -- the winding is baked in at construction and never touched
// again. Both halves of the pair are then plain real 3D fields advanced by
// the main solver's transport operator verbatim (same anti-aliasing, same
// stage arithmetic), which is what makes the member sum telescope to the
// main unknown exactly: reconstruction is a plain sum of the stored real
// parts. Winding-invariant measurements (band sup-norms, pointwise moduli)
// read the pair directly; per-mode attributions extract the lab vertical
// coefficient from the collocated sum.

namespace hlx::members {

using helical::HelicoidalState;

// Complex field stored as two real fields.
struct ComplexField {
    ScalarField re, im;
    ComplexField() = default;
    explicit ComplexField(const GridSpec& g) : re(g), im(g) {}
};

// One member. Components at t = 0 (all stored with the e^{inz} winding
// already multiplied in):
//   wz = (Delta_q of the n-th vertical coefficient of omega_z^0) e^{inz},
//   w1 = -y wz,   w2 = x wz,
// and, when moments are carried, the horizontal moments of (w1, w2):
//   mx1 = x w1, mx2 = x w2, my1 = y w1, my2 = y w2.
// The z-row moments x wz and y wz are NOT separate unknowns: they satisfy
// bit-for-bit the same discrete systems as w2 and -w1, so those fields
// already are the co-evolved z-moments.
struct DecompositionMember {
    int q = 0;     // horizontal band; the remainder member uses qmin - 1
    int n = 0;     // vertical mode, |n| < Nz/2
    bool remainder = false;  // carries everything outside the covered annulus
    bool active = true;      // initial norm above threshold; inactive members
                             // hold no fields and are skipped everywhere
    bool has_moments = false;
    double time = 0.0;
    ComplexField w1, w2, wz;
    ComplexField mx1, mx2, my1, my2;
};

struct InitOptions {
    // Vertical mode range; INT_MIN sentinels mean "all resolved modes"
    // (|n| <= Nz/2 - 1). Exceeding the resolved range is a config_error.
    int n_min = unset, n_max = unset;
    // Band range; sentinels mean the partition's [qmin, qmax].
    int q_min = unset, q_max = unset;
    // Add one member per n holding f_n minus its covered bands, so the sum
    // over members telescopes to the full field.
    bool include_remainder = true;
    bool with_moments = true;
    // Members whose |wz| sup falls at or below threshold * (largest member's)
    // are flagged inactive and carry no fields.
    double active_threshold = 1e-14;

    static constexpr int unset = -1000000;
};

// Splits omega_z0 by vertical coefficient and horizontal band. The returned
// list covers the full (q, n) rectangle (plus the remainder row when
// enabled) ordered by (n, q), the remainder slot leading its n-row; inactive
// members keep their slot but hold no fields. The member count is
// |q_range| * |n_range| plus |n_range| remainder slots.
std::vector<DecompositionMember> init_members(const ScalarField& omega_z0,
                                              const dyadic::DyadicProfile& pr,
                                              const InitOptions& opt = {});

// The four stage velocities of one accepted RK4 step of the main unknown.
struct StageSet {
    double time = 0.0;  // start of the step
    double dt = 0.0;
    std::array<evolve::StageVelocity, 4> stages;
};

// Advances every active member through one RK4 step against the given
// stages. Member transport is the main stepper's conservative transport
// verbatim on each stored real field; the source terms are pointwise
// products with the stage velocity (w1 <- -wz*uty, w2 <- +wz*utx, and the
// closed moment sources mx1 <- utx*w1 - uty*w2, mx2 <- 2 utx*w2,
// my1 <- 2 uty*w1, my2 <- uty*w2 - utx*w1). Throws config_error when a
// member's clock does not match the stage set.
void co_evolve_step(std::vector<DecompositionMember>& members, const StageSet& s,
                    bool dealias = true);

// Plain sum of the members' stored real parts (the windings are baked into
// the fields; imaginary parts cancel across conjugate mode pairs). omega is
// the reconstructed vorticity vector (w1, w2, wz sums); the moment sums are
// filled when every active member carries moments. Meaningful when the
// member set's mode range is conjugate-symmetric, as the defaults are.
struct Reconstruction {
    VectorField3 omega;
    bool has_moments = false;
    ScalarField mx1, mx2, my1, my2;
};
Reconstruction reconstruct(const std::vector<DecompositionMember>& members);

// Per-band sup norms ||Delta_j (component)||_inf of one member, j over the
// partition range; complex fields are measured on the modulus, maximized
// over planes (the winding has modulus 1, so this is the sup of the
// physical member component).
struct BandDecayRow {
    int j = 0;
    double w1 = 0.0, w2 = 0.0, wz = 0.0;
};
std::vector<BandDecayRow> band_decay_profile(const DecompositionMember& m,
                                             const dyadic::DyadicProfile& pr);

// Least-squares slope of log2 ||Delta_j wz||_inf against |j - q| over the
// rows at least `floor` times the member's peak (NaN when fewer than three
// rows qualify).
double decay_slope(const std::vector<BandDecayRow>& rows, int q, double floor = 1e-14);

// Near/far-diagonal split of the band budget of the reconstructed field, by
// lab vertical mode n. For each n the per-band attribution is
//   S_{q,n} = (vertical coefficient n) of (sum over the q-family's members),
// which sums over q exactly to the coefficient R_n of the reconstruction;
// total = sum_j ||Delta_j R_n||_inf, and near[N-1]/far[N-1] split the
// triangle-inequality bound sum_{j,q} ||Delta_j S_{q,n}||_inf by
// |j - q| < N versus >= N (the remainder member counts as far at every N).
struct BesovBudgetRow {
    int n = 0;
    double total = 0.0;
    std::array<double, 6> near_part{};
    std::array<double, 6> far_part{};
};
struct BesovBudget {
    double time = 0.0;
    std::vector<BesovBudgetRow> rows;
    double grand_total = 0.0;  // sum of row totals: the hybrid B^0_{inf,1}
                               // band sum of the reconstructed omega_z
};
BesovBudget besov_budget_report(const std::vector<DecompositionMember>& members,
                                const dyadic::DyadicProfile& pr);

// Relative L_inf defects between the co-evolved moment fields and the
// pointwise coordinate products of the co-evolved members; the z-row checks
// compare w2 and -w1 against x wz and y wz. All identities are exact at
// t = 0 and track each other through the shared scheme afterwards.
struct MomentConsistency {
    double mx1 = 0.0, mx2 = 0.0, my1 = 0.0, my2 = 0.0;  // vs x*w1, x*w2, y*w1, y*w2
    double zx = 0.0, zy = 0.0;                          // w2 vs x*wz, w1 vs -y*wz
    double worst = 0.0;
};
MomentConsistency moment_consistency(const DecompositionMember& m);

// Lockstep driver: runs the reduced main path from `initial` with the same
// stepping rules as evolve::run (fixed dt under a CFL cap) while advancing
// the members against every accepted step's stages. The sampler, when set,
// is invoked at t = 0, after every accepted step, and at T.
struct LockstepResult {
    HelicoidalState final_state;
    bool aborted = false;
    std::string abort_reason;
    int steps = 0;
};
using LockstepSampler =
    std::function<void(int step, const HelicoidalState&, const std::vector<DecompositionMember>&)>;
LockstepResult co_evolve(const HelicoidalState& initial,
                         std::vector<DecompositionMember>& members,
                         const evolve::SolverConfig& cfg, const LockstepSampler& sample = {});

// CSV emission for the analyze command: band_decay rows are
// (time, q, n, j, w1, w2, wz) over active members, budget rows are
// (time, n, total, near_1..near_6, far_1..far_6).
diag::DiagnosticsSeries band_decay_csv(const std::vector<DecompositionMember>& members,
                                       const dyadic::DyadicProfile& pr, double time);
diag::DiagnosticsSeries besov_budget_csv(const std::vector<BesovBudget>& budgets);

} // namespace hlx::members

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hlx/evolve.hpp"
#include "hlx/grid.hpp"
#include "hlx/helical.hpp"

// Run configuration: line-oriented structured text, diff-able and
// language-agnostic. Sections in brackets, key = value lines, '#' or ';'
// comments. Example:
//
//   [grid]
//   N = 128
//   Nz = 8
//   L = 6.283185307179586
//
//   [profile]
//   # term = <m> <amplitude> <phase> <center> <width>   (repeatable)
//   term = 1  0.20 0.0 1.45 0.30
//   # or instead:  snapshot = path/to/state.json
//
//   [solver]
//   dt = 0.03125
//   T = 1.0
//   cfl_target = 0.5
//   mode = reduced          # reduced | full3d | both
//   dealias = on
//   snapshot_every = 0
//   div_tol = 5e-3
//
//   [analysis]
//   decomposition = off
//   norms = sup l1 l2 energy besov
//   # q_min/q_max override the dyadic band range
//
//   [output]
//   dir = out
//
//   [rng]
//   algorithm = splitmix64
//   seed = 1
//
// Every section and key is optional; omissions keep the reference defaults
// below. Unknown sections/keys, malformed values, a [profile] mixing term
// lines with a snapshot reference, or a snapshot path that does not exist
// are config_errors carrying the line number.

namespace hlx::config {

struct AnalysisConfig {
    bool decomposition = false;
    // dyadic band range overrides; unset means the grid's default partition
    static constexpr int band_unset = -1000000;
    int q_min = band_unset;
    int q_max = band_unset;
    std::vector<std::string> norms = {"sup", "l1", "l2", "energy", "besov"};
};

struct RngConfig {
    std::string algorithm = "splitmix64"; // the only supported generator
    std::uint64_t seed = 1;
};

struct RunConfig {
    GridSpec grid{6.283185307179586, 128, 8};
    helical::HelicoidalProfile profile = helical::default_profile();
    bool profile_from_snapshot = false;
    std::string snapshot_path; // set iff profile_from_snapshot
    evolve::SolverConfig solver;
    evolve::RunMode mode = evolve::RunMode::reduced;
    AnalysisConfig analysis;
    std::string output_dir = "out";
    RngConfig rng;
};

RunConfig parse_file(const std::filesystem::path& path);
// origin names the source in error messages (a file name, "<inline>", ...)
RunConfig parse_string(const std::string& text, const std::string& origin);

// Emits a config as parseable text; parse_string(render(c)) reproduces c.
std::string render(const RunConfig& c);

} // namespace hlx::config

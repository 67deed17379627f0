#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hlx/grid.hpp"

// Field persistence. One scalar component per file: a text header line
// "HLX1 <N> <Nz> <L>" (L with full round-trip precision) followed by the
// samples as row-major little-endian 64-bit floats in the ScalarField
// layout (x outer, then y, then z). A JSON sidecar ties the components of
// one snapshot together with the grid metadata and the time stamp. Files
// are written to a temporary name and renamed into place, so a reader never
// sees a half-written snapshot.

namespace hlx::snapshot {

// Single-component primitives. Failures (missing file, bad magic, size
// mismatch) throw config_error.
void write_field(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_field(const std::filesystem::path& path);

struct SnapshotMeta {
    GridSpec grid;
    double time = 0.0;
    // component name -> file name (relative to the sidecar's directory)
    std::vector<std::pair<std::string, std::string>> components;
};

// Writes <name>_<component>.f64 for every component plus the sidecar
// <name>.json into dir; returns the sidecar path.
std::filesystem::path write_snapshot(const std::filesystem::path& dir, const std::string& name,
                                     double time,
                                     const std::vector<std::pair<std::string, const ScalarField*>>& components);

SnapshotMeta read_sidecar(const std::filesystem::path& sidecar);

// Loads every component listed in the sidecar; verifies all grids agree
// with the sidecar's metadata.
std::map<std::string, ScalarField> read_snapshot(const std::filesystem::path& sidecar,
                                                 SnapshotMeta* meta = nullptr);

} // namespace hlx::snapshot

#include "hlx/snapshot.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hlx/errors.hpp"

namespace hlx::snapshot {

namespace {

namespace fs = std::filesystem;

// The on-disk order is little-endian; byte-swap on a big-endian host.
void to_disk_order(std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::big) {
        for (double& d : v) {
            std::uint64_t u;
            std::memcpy(&u, &d, 8);
            u = __builtin_bswap64(u);
            std::memcpy(&d, &u, 8);
        }
    }
}

std::string header_line(const GridSpec& g) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "HLX1 %d %d %.17g\n", g.N, g.Nz, g.L);
    return buf;
}

void atomic_replace(const fs::path& tmp, const fs::path& path) {
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw config_error("snapshot: cannot move " + tmp.string() + " to " + path.string() +
                           ": " + ec.message());
    }
}

} // namespace

void write_field(const fs::path& path, const ScalarField& f) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw config_error("snapshot: cannot open " + tmp.string() + " for writing");
        const std::string hdr = header_line(f.grid);
        out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
        std::vector<double> v = f.v;
        to_disk_order(v);
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw config_error("snapshot: short write to " + tmp.string());
        }
    }
    atomic_replace(tmp, path);
}

ScalarField read_field(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("snapshot: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw config_error("snapshot: empty file " + path.string());
    std::istringstream hdr(line);
    std::string magic;
    GridSpec g;
    if (!(hdr >> magic >> g.N >> g.Nz >> g.L) || magic != "HLX1")
        throw config_error("snapshot: " + path.string() + " is not an HLX1 field file");
    ScalarField f(g);
    in.read(reinterpret_cast<char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != f.v.size() * sizeof(double))
        throw config_error("snapshot: " + path.string() + " is truncated (expected " +
                           std::to_string(f.v.size()) + " samples)");
    to_disk_order(f.v);
    return f;
}

std::filesystem::path write_snapshot(
    const fs::path& dir, const std::string& name, double time,
    const std::vector<std::pair<std::string, const ScalarField*>>& components) {
    if (components.empty())
        throw config_error("snapshot: refusing to write an empty snapshot " + name);
    std::error_code ec;
    fs::create_directories(dir, ec);

    nlohmann::json meta;
    meta["format"] = "HLX1";
    const GridSpec& g = components.front().second->grid;
    meta["grid"] = {{"N", g.N}, {"Nz", g.Nz}, {"L", g.L}};
    meta["time"] = time;
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [comp, field] : components) {
        require_same_grid(g, field->grid, "write_snapshot");
        const std::string fname = name + "_" + comp + ".f64";
        write_field(dir / fname, *field);
        files[comp] = fname;
    }
    meta["components"] = files;

    const fs::path sidecar = dir / (name + ".json");
    const fs::path tmp = sidecar.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw config_error("snapshot: cannot open " + tmp.string() + " for writing");
        out << meta.dump(2) << "\n";
    }
    atomic_replace(tmp, sidecar);
    return sidecar;
}

SnapshotMeta read_sidecar(const fs::path& sidecar) {
    std::ifstream in(sidecar);
    if (!in) throw config_error("snapshot: cannot open sidecar " + sidecar.string());
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("snapshot: bad sidecar " + sidecar.string() + ": " + e.what());
    }
    SnapshotMeta out;
    try {
        if (meta.at("format").get<std::string>() != "HLX1")
            throw config_error("snapshot: sidecar " + sidecar.string() +
                               " has an unknown format tag");
        out.grid.N = meta.at("grid").at("N").get<int>();
        out.grid.Nz = meta.at("grid").at("Nz").get<int>();
        out.grid.L = meta.at("grid").at("L").get<double>();
        out.time = meta.at("time").get<double>();
        for (const auto& [comp, fname] : meta.at("components").items())
            out.components.emplace_back(comp, fname.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw config_error("snapshot: sidecar " + sidecar.string() +
                           " is missing required fields: " + e.what());
    }
    return out;
}

std::map<std::string, ScalarField> read_snapshot(const fs::path& sidecar, SnapshotMeta* meta) {
    SnapshotMeta m = read_sidecar(sidecar);
    const fs::path dir = sidecar.parent_path();
    std::map<std::string, ScalarField> out;
    for (const auto& [comp, fname] : m.components) {
        ScalarField f = read_field(dir / fname);
        if (f.grid.N != m.grid.N || f.grid.Nz != m.grid.Nz ||
            std::abs(f.grid.L - m.grid.L) > 1e-12 * std::max(1.0, std::abs(m.grid.L)))
            throw config_error("snapshot: component " + comp + " of " + sidecar.string() +
                               " disagrees with the sidecar grid");
        out.emplace(comp, std::move(f));
    }
    if (meta) *meta = std::move(m);
    return out;
}

} // namespace hlx::snapshot

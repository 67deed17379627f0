#include "hlx/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hlx/errors.hpp"

namespace hlx::config {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct KeyLine {
    int no = 0;
    std::string key, value;
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw config_error(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& origin, const KeyLine& l) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(l.value, &pos);
    } catch (const std::exception&) {
        fail(origin, l.no, "key '" + l.key + "': '" + l.value + "' is not a number");
    }
    if (pos != l.value.size())
        fail(origin, l.no, "key '" + l.key + "': trailing characters after '" + l.value + "'");
    return v;
}

long long parse_int(const std::string& origin, const KeyLine& l) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(l.value, &pos);
    } catch (const std::exception&) {
        fail(origin, l.no, "key '" + l.key + "': '" + l.value + "' is not an integer");
    }
    if (pos != l.value.size())
        fail(origin, l.no, "key '" + l.key + "': trailing characters after '" + l.value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& origin, const KeyLine& l) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(l.value, &pos);
    } catch (const std::exception&) {
        fail(origin, l.no, "key '" + l.key + "': '" + l.value + "' is not an unsigned integer");
    }
    if (pos != l.value.size() || l.value.find('-') != std::string::npos)
        fail(origin, l.no, "key '" + l.key + "': '" + l.value + "' is not an unsigned integer");
    return v;
}

bool parse_bool(const std::string& origin, const KeyLine& l) {
    std::string v = l.value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
    if (v == "off" || v == "false" || v == "no" || v == "0") return false;
    fail(origin, l.no, "key '" + l.key + "': '" + l.value + "' is not a flag (on/off)");
}

bool power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

RunConfig parse_string(const std::string& text, const std::string& origin) {
    // Pass 1: split into (section, key, value) with line numbers.
    std::map<std::string, std::vector<KeyLine>> sections;
    const std::set<std::string> known_sections = {"grid",     "profile", "solver",
                                                  "analysis", "output",  "rng"};
    {
        std::istringstream in(text);
        std::string raw, section;
        int no = 0;
        while (std::getline(in, raw)) {
            ++no;
            const auto cut = raw.find_first_of("#;");
            std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(origin, no, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (!known_sections.count(section))
                    fail(origin, no, "unknown section [" + section + "]");
                sections.try_emplace(section);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                fail(origin, no, "expected 'key = value', got '" + line + "'");
            if (section.empty()) fail(origin, no, "key before any [section]");
            KeyLine kl;
            kl.no = no;
            kl.key = trim(line.substr(0, eq));
            kl.value = trim(line.substr(eq + 1));
            if (kl.key.empty()) fail(origin, no, "empty key");
            if (kl.value.empty()) fail(origin, no, "key '" + kl.key + "': empty value");
            sections[section].push_back(std::move(kl));
        }
    }

    // Pass 2: dispatch with per-section known-key tables; 'term' is the one
    // repeatable key, everything else must appear at most once.
    RunConfig c;
    bool profile_given = false;
    auto visit = [&](const std::string& section,
                     const std::map<std::string, std::function<void(const KeyLine&)>>& handlers,
                     const char* repeatable = nullptr) {
        auto it = sections.find(section);
        if (it == sections.end()) return;
        std::set<std::string> seen;
        for (const KeyLine& l : it->second) {
            auto h = handlers.find(l.key);
            if (h == handlers.end())
                fail(origin, l.no, "unknown key '" + l.key + "' in [" + section + "]");
            if ((!repeatable || l.key != repeatable) && !seen.insert(l.key).second)
                fail(origin, l.no, "duplicate key '" + l.key + "' in [" + section + "]");
            h->second(l);
        }
    };

    visit("grid", {
        {"N", [&](const KeyLine& l) {
             const long long n = parse_int(origin, l);
             if (!power_of_two(n) || n < 8)
                 fail(origin, l.no, "N must be a power of two >= 8, got " + l.value);
             c.grid.N = static_cast<int>(n);
         }},
        {"Nz", [&](const KeyLine& l) {
             const long long n = parse_int(origin, l);
             if (!power_of_two(n) || n < 2)
                 fail(origin, l.no, "Nz must be a power of two >= 2, got " + l.value);
             c.grid.Nz = static_cast<int>(n);
         }},
        {"L", [&](const KeyLine& l) {
             c.grid.L = parse_double(origin, l);
             if (!(c.grid.L > 0.0)) fail(origin, l.no, "L must be positive");
         }},
    });

    {
        std::vector<helical::HelicalTerm> terms;
        std::string snap;
        int snap_line = 0;
        visit("profile", {
            {"term", [&](const KeyLine& l) {
                 std::istringstream v(l.value);
                 helical::HelicalTerm t;
                 if (!(v >> t.m >> t.amplitude >> t.phase >> t.center >> t.width) ||
                     !(v >> std::ws).eof())
                     fail(origin, l.no,
                          "term wants '<m> <amplitude> <phase> <center> <width>', got '" +
                              l.value + "'");
                 if (t.m < 0) fail(origin, l.no, "term: winding m must be >= 0");
                 if (!(t.width > 0.0)) fail(origin, l.no, "term: width must be positive");
                 if (!(t.center >= 0.0)) fail(origin, l.no, "term: center must be >= 0");
                 terms.push_back(t);
             }},
            {"snapshot", [&](const KeyLine& l) {
                 snap = l.value;
                 snap_line = l.no;
             }},
        }, "term");
        if (!terms.empty() && !snap.empty())
            fail(origin, snap_line, "[profile] mixes term lines with a snapshot reference");
        if (!snap.empty()) {
            if (!std::filesystem::exists(snap))
                fail(origin, snap_line, "snapshot '" + snap + "' does not exist");
            c.profile_from_snapshot = true;
            c.snapshot_path = snap;
            c.profile.terms.clear();
            profile_given = true;
        } else if (!terms.empty()) {
            c.profile.terms = std::move(terms);
            profile_given = true;
        }
    }
    (void)profile_given; // absent [profile] keeps the reference default

    visit("solver", {
        {"dt", [&](const KeyLine& l) {
             c.solver.dt = parse_double(origin, l);
             if (!(c.solver.dt > 0.0)) fail(origin, l.no, "dt must be positive");
         }},
        {"T", [&](const KeyLine& l) {
             c.solver.T = parse_double(origin, l);
             if (!(c.solver.T >= 0.0)) fail(origin, l.no, "T must be >= 0");
         }},
        {"cfl_target", [&](const KeyLine& l) {
             c.solver.cfl_target = parse_double(origin, l);
             if (!(c.solver.cfl_target > 0.0)) fail(origin, l.no, "cfl_target must be positive");
         }},
        {"mode", [&](const KeyLine& l) {
             if (l.value == "reduced") c.mode = evolve::RunMode::reduced;
             else if (l.value == "full3d") c.mode = evolve::RunMode::full3d;
             else if (l.value == "both") c.mode = evolve::RunMode::both;
             else fail(origin, l.no, "mode must be reduced, full3d or both, got '" + l.value + "'");
         }},
        {"dealias", [&](const KeyLine& l) { c.solver.dealias = parse_bool(origin, l); }},
        {"snapshot_every", [&](const KeyLine& l) {
             const long long n = parse_int(origin, l);
             if (n < 0) fail(origin, l.no, "snapshot_every must be >= 0");
             c.solver.snapshot_every = static_cast<int>(n);
         }},
        {"div_tol", [&](const KeyLine& l) {
             c.solver.div_tol = parse_double(origin, l);
             if (!(c.solver.div_tol > 0.0)) fail(origin, l.no, "div_tol must be positive");
         }},
    });

    visit("analysis", {
        {"decomposition", [&](const KeyLine& l) {
             c.analysis.decomposition = parse_bool(origin, l);
         }},
        {"q_min", [&](const KeyLine& l) {
             c.analysis.q_min = static_cast<int>(parse_int(origin, l));
         }},
        {"q_max", [&](const KeyLine& l) {
             c.analysis.q_max = static_cast<int>(parse_int(origin, l));
         }},
        {"norms", [&](const KeyLine& l) {
             const std::set<std::string> known = {"sup", "l1", "l2", "energy", "besov"};
             std::istringstream v(l.value);
             std::vector<std::string> norms;
             std::string tok;
             while (v >> tok) {
                 if (!known.count(tok))
                     fail(origin, l.no,
                          "unknown norm '" + tok + "' (choose from sup l1 l2 energy besov)");
                 norms.push_back(tok);
             }
             c.analysis.norms = std::move(norms);
         }},
    });

    visit("output", {
        {"dir", [&](const KeyLine& l) { c.output_dir = l.value; }},
    });

    visit("rng", {
        {"algorithm", [&](const KeyLine& l) {
             if (l.value != "splitmix64")
                 fail(origin, l.no,
                      "unknown rng algorithm '" + l.value + "' (supported: splitmix64)");
             c.rng.algorithm = l.value;
         }},
        {"seed", [&](const KeyLine& l) { c.rng.seed = parse_u64(origin, l); }},
    });

    return c;
}

RunConfig parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path.string());
}

std::string render(const RunConfig& c) {
    std::ostringstream o;
    o << "[grid]\n";
    o << "N = " << c.grid.N << "\n";
    o << "Nz = " << c.grid.Nz << "\n";
    o << "L = " << fmt_g(c.grid.L) << "\n\n";
    o << "[profile]\n";
    if (c.profile_from_snapshot) {
        o << "snapshot = " << c.snapshot_path << "\n";
    } else {
        o << "# term = <m> <amplitude> <phase> <center> <width>\n";
        for (const helical::HelicalTerm& t : c.profile.terms)
            o << "term = " << t.m << " " << fmt_g(t.amplitude) << " " << fmt_g(t.phase) << " "
              << fmt_g(t.center) << " " << fmt_g(t.width) << "\n";
    }
    o << "\n[solver]\n";
    o << "dt = " << fmt_g(c.solver.dt) << "\n";
    o << "T = " << fmt_g(c.solver.T) << "\n";
    o << "cfl_target = " << fmt_g(c.solver.cfl_target) << "\n";
    o << "mode = "
      << (c.mode == evolve::RunMode::reduced
              ? "reduced"
              : (c.mode == evolve::RunMode::full3d ? "full3d" : "both"))
      << "\n";
    o << "dealias = " << (c.solver.dealias ? "on" : "off") << "\n";
    o << "snapshot_every = " << c.solver.snapshot_every << "\n";
    o << "div_tol = " << fmt_g(c.solver.div_tol) << "\n\n";
    o << "[analysis]\n";
    o << "decomposition = " << (c.analysis.decomposition ? "on" : "off") << "\n";
    if (c.analysis.q_min != AnalysisConfig::band_unset)
        o << "q_min = " << c.analysis.q_min << "\n";
    if (c.analysis.q_max != AnalysisConfig::band_unset)
        o << "q_max = " << c.analysis.q_max << "\n";
    o << "norms =";
    for (const std::string& n : c.analysis.norms) o << " " << n;
    o << "\n\n[output]\n";
    o << "dir = " << c.output_dir << "\n\n";
    o << "[rng]\n";
    o << "algorithm = " << c.rng.algorithm << "\n";
    o << "seed = " << c.rng.seed << "\n";
    return o.str();
}

} // namespace hlx::config

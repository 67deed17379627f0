#include "hlx/diagnostics.hpp"

#include <cstdio>
#include <sstream>

#include "hlx/errors.hpp"

namespace hlx::diag {

DiagnosticsSeries::DiagnosticsSeries(std::vector<std::string> cols) : schema(std::move(cols)) {
    if (schema.empty()) throw config_error("diagnostics schema must not be empty");
}

void DiagnosticsSeries::add_row(std::vector<double> r) {
    if (r.size() != schema.size())
        throw config_error("diagnostics row has " + std::to_string(r.size()) +
                           " values for a schema of " + std::to_string(schema.size()));
    rows.push_back(std::move(r));
}

std::size_t DiagnosticsSeries::col_index(std::string_view name) const {
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (schema[i] == name) return i;
    throw config_error("diagnostics column not found: " + std::string(name));
}

double DiagnosticsSeries::value(std::size_t row, std::string_view name) const {
    return rows.at(row)[col_index(name)];
}

std::vector<double> DiagnosticsSeries::column(std::string_view name) const {
    const std::size_t c = col_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

std::string DiagnosticsSeries::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (i) out += ',';
        out += schema[i];
    }
    out += '\n';
    char buf[40];
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            std::snprintf(buf, sizeof buf, "%.16e", r[i]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

DiagnosticsSeries DiagnosticsSeries::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw config_error("diagnostics csv: empty input");
    DiagnosticsSeries s;
    {
        std::istringstream hdr(line);
        std::string cell;
        while (std::getline(hdr, cell, ',')) s.schema.push_back(cell);
    }
    if (s.schema.empty()) throw config_error("diagnostics csv: empty header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw config_error("diagnostics csv: bad number '" + cell + "'");
            }
        }
        s.add_row(std::move(vals));
    }
    return s;
}

} // namespace hlx::diag

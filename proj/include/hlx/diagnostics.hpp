#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Time-series of named scalar metrics with a schema fixed at construction.
// CSV serialization uses a fixed numeric format so identical runs produce
// byte-identical files.

namespace hlx::diag {

struct DiagnosticsSeries {
    std::vector<std::string> schema; // column names, first is always "time"
    std::vector<std::vector<double>> rows;

    DiagnosticsSeries() = default;
    explicit DiagnosticsSeries(std::vector<std::string> cols);

    // row size must match the schema
    void add_row(std::vector<double> r);

    std::size_t col_index(std::string_view name) const; // throws if absent
    double value(std::size_t row, std::string_view name) const;
    std::vector<double> column(std::string_view name) const;

    std::string to_csv() const;
    static DiagnosticsSeries from_csv(const std::string& text);
};

} // namespace hlx::diag

#include "hlx/grid.hpp"

#include <cmath>
#include <string>

#include "hlx/errors.hpp"

namespace hlx {

namespace {
constexpr double pi = 3.14159265358979323846;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
} // namespace

double GridSpec::dz() const { return 2.0 * pi / Nz; }
double GridSpec::z(int k) const { return -pi + k * dz(); }
double GridSpec::kx(int i) const { return (pi / L) * hmode(i); }

void GridSpec::validate() const {
    if (!(L > 0.0)) throw config_error("grid: L must be positive, got " + std::to_string(L));
    if (N < 8 || !power_of_two(N))
        throw config_error("grid: N must be a power of two >= 8, got " + std::to_string(N));
    if (Nz < 2 || !power_of_two(Nz))
        throw config_error("grid: Nz must be a power of two >= 2, got " + std::to_string(Nz));
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!(a == b))
        throw config_error(std::string(where) + ": fields live on different grids");
}

bool all_finite(const ScalarField& f) {
    for (double x : f.v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const VectorField3& f) {
    return all_finite(f.x) && all_finite(f.y) && all_finite(f.z);
}

} // namespace hlx

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Discretization of the slab [-L,L)^2 x [-pi,pi): horizontal periodic box of
// half-width L (N points per axis), vertical period fixed to 2*pi (Nz points).
// Storage is row-major (x index slowest, z index fastest). Spectral arrays use
// the same layout with FFT index order; spectral coefficients follow the
// coordinate-phase convention
//     fhat(m1,m2,n) = (1/(N*N*Nz)) sum f(x,y,z) e^{-i(k1 x + k2 y + n z)}
// with k = (pi/L)*m horizontally and integer n vertically, so a coefficient is
// literally the trigonometric-series coefficient of the sampled field with the
// box offsets folded in.

namespace hlx {

using cplx = std::complex<double>;

struct GridSpec {
    double L = 0.0; // horizontal half-width; domain [-L,L)^2
    int N = 0;      // horizontal samples per axis, power of two, >= 8
    int Nz = 0;     // vertical samples, power of two, >= 2

    double hx() const { return 2.0 * L / N; }
    double dz() const;
    double x(int i) const { return -L + i * hx(); }
    double z(int k) const;

    // FFT storage index -> signed mode number in [-N/2, N/2)
    int hmode(int i) const { return i < N / 2 ? i : i - N; }
    int vmode(int k) const { return k < Nz / 2 ? k : k - Nz; }
    // horizontal wavenumber, integer multiples of pi/L
    double kx(int i) const;

    std::size_t size3() const { return static_cast<std::size_t>(N) * N * Nz; }
    std::size_t size2() const { return static_cast<std::size_t>(N) * N; }
    std::size_t idx3(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * N + j) * Nz + k;
    }
    std::size_t idx2(int i, int j) const { return static_cast<std::size_t>(i) * N + j; }

    bool operator==(const GridSpec&) const = default;

    // throws config_error on invalid parameters
    void validate() const;
};

// Real scalar samples on the 3D grid.
struct ScalarField {
    GridSpec grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g) : grid(g), v(g.size3(), 0.0) {}
};

// Complex spectral coefficients of a 3D field, FFT index order.
struct SpectralField {
    GridSpec grid;
    std::vector<cplx> c;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), c(g.size3(), cplx{}) {}
};

struct VectorField3 {
    ScalarField x, y, z;

    VectorField3() = default;
    explicit VectorField3(const GridSpec& g) : x(g), y(g), z(g) {}
    const GridSpec& grid() const { return x.grid; }
    const ScalarField& comp(int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    ScalarField& comp(int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

// Complex samples on the horizontal grid (one vertical Fourier coefficient,
// one decomposition member component, ...).
struct Field2 {
    GridSpec grid; // only L and N are meaningful here
    std::vector<cplx> v;

    Field2() = default;
    explicit Field2(const GridSpec& g) : grid(g), v(g.size2(), cplx{}) {}
};

// Horizontal spectrum of a Field2, FFT index order, coordinate-phase convention.
struct Spec2 {
    GridSpec grid;
    std::vector<cplx> c;

    Spec2() = default;
    explicit Spec2(const GridSpec& g) : grid(g), c(g.size2(), cplx{}) {}
};

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);
bool all_finite(const ScalarField& f);
bool all_finite(const VectorField3& f);

} // namespace hlx

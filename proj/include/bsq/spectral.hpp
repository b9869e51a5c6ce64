#pragma once

#include "bsq/grid.hpp"

#include <complex>
#include <span>

namespace bsq {

/// Half-plane spectrum of a real field, as produced by a real-to-complex
/// transform: ny rows of nx/2+1 coefficients, unnormalized.
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(GridPtr grid);

    const GridSpec& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    std::span<std::complex<double>> coeffs() { return coeffs_; }
    std::span<const std::complex<double>> coeffs() const { return coeffs_; }

    std::complex<double>& operator()(std::size_t ikx, std::size_t jky) { return coeffs_[jky * grid_->nkx() + ikx]; }
    std::complex<double> operator()(std::size_t ikx, std::size_t jky) const {
        return coeffs_[jky * grid_->nkx() + ikx];
    }

    Spectrum& operator+=(const Spectrum& o);
    Spectrum& operator*=(double s);

private:
    GridPtr grid_;
    ComplexVector coeffs_;
};

/// Wavenumber data for one half-plane coefficient.
struct Mode {
    double kx;
    double ky;
    double k2;          // kx^2 + ky^2
    bool x_nyquist;     // column nx/2
    bool y_nyquist;     // row ny/2
    bool outside_2_3;   // |fx| > nx/3 or |fy| > ny/3
};

/// Calls f(coefficient&, const Mode&) for every half-plane coefficient.
template <typename F>
void for_each_mode(Spectrum& s, F&& f) {
    const GridSpec& g = s.grid();
    const std::size_t nkx = g.nkx();
    auto c = s.coeffs();
    for (std::size_t j = 0; j < g.ny; ++j) {
        const double ky = g.ky[j];
        const long fy = signed_frequency(j, g.ny);
        const bool y_nyq = (j == g.ny / 2);
        const bool y_cut = 3 * static_cast<std::size_t>(fy < 0 ? -fy : fy) > g.ny;
        for (std::size_t i = 0; i < nkx; ++i) {
            const double kx = g.kx[i];
            const bool x_nyq = (i == g.nx / 2);
            const bool x_cut = 3 * i > g.nx;
            const Mode m{kx, ky, kx * kx + ky * ky, x_nyq, y_nyq, x_cut || y_cut};
            f(c[j * nkx + i], m);
        }
    }
}

/// Forward real-to-complex transform (unnormalized).
Spectrum forward(const ScalarField& f);

/// Inverse transform including the 1/(nx*ny) normalization.
ScalarField inverse(Spectrum s);

// Spectral-space kernels. All act in place.
void apply_ddx(Spectrum& s);
void apply_ddy(Spectrum& s);
void apply_laplacian(Spectrum& s);
void apply_helmholtz_inverse(Spectrum& s, double kappa);
void apply_two_thirds_filter(Spectrum& s);

/// Physical-space L2 norm computed from the spectrum (Parseval).
double spectral_l2_norm(const Spectrum& s);

ScalarField ddx(const ScalarField& f);
ScalarField ddy(const ScalarField& f);

/// Multiplies the spectrum by -(kx^2 + ky^2).
ScalarField laplacian(const ScalarField& f);

/// Solves (1 - kappa*Laplacian) u = f by spectral division. kappa >= 0.
ScalarField helmholtz_solve(const ScalarField& f, double kappa);

/// Zeros every mode whose signed frequency index exceeds n/3 in either
/// direction. Idempotent.
ScalarField dealias(const ScalarField& f);

}  // namespace bsq

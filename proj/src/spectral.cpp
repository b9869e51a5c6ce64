#include "bsq/spectral.hpp"

#include "bsq/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace bsq {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per grid shape and shared read-only.
struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, p] : plans_) {
            fftw_destroy_plan(p.r2c);
            fftw_destroy_plan(p.c2r);
        }
    }

    PlanPair get(std::size_t nx, std::size_t ny) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find({nx, ny});
        if (it != plans_.end()) return it->second;

        RealVector real(nx * ny);
        ComplexVector cplx(ny * (nx / 2 + 1));
        auto* r = real.data();
        auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
        const int n0 = static_cast<int>(ny);
        const int n1 = static_cast<int>(nx);
        // FFTW_ESTIMATE keeps plan selection deterministic from run to run.
        PlanPair p;
        p.r2c = fftw_plan_dft_r2c_2d(n0, n1, r, c, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_2d(n0, n1, c, r, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
        if (!p.r2c || !p.c2r) throw Error("FFTW planning failed");
        plans_.emplace(std::make_pair(nx, ny), p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, std::size_t>, PlanPair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

Spectrum::Spectrum(GridPtr grid) : grid_(std::move(grid)), coeffs_(grid_->spectrum_size()) {}

Spectrum& Spectrum::operator+=(const Spectrum& o) {
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
}

Spectrum& Spectrum::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

Spectrum forward(const ScalarField& f) {
    const GridSpec& g = f.grid();
    Spectrum s(f.grid_ptr());
    const PlanPair p = plan_cache().get(g.nx, g.ny);
    // r2c out-of-place leaves the input untouched.
    fftw_execute_dft_r2c(p.r2c, const_cast<double*>(f.data().data()),
                         reinterpret_cast<fftw_complex*>(s.coeffs().data()));
    return s;
}

ScalarField inverse(Spectrum s) {
    const GridSpec& g = s.grid();
    ScalarField out(s.grid_ptr());
    const PlanPair p = plan_cache().get(g.nx, g.ny);
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(s.coeffs().data()), out.data().data());
    out *= 1.0 / static_cast<double>(g.size());
    return out;
}

void apply_ddx(Spectrum& s) {
    for_each_mode(s, [](std::complex<double>& c, const Mode& m) {
        c = m.x_nyquist ? std::complex<double>{} : std::complex<double>(-m.kx * c.imag(), m.kx * c.real());
    });
}

void apply_ddy(Spectrum& s) {
    for_each_mode(s, [](std::complex<double>& c, const Mode& m) {
        c = m.y_nyquist ? std::complex<double>{} : std::complex<double>(-m.ky * c.imag(), m.ky * c.real());
    });
}

void apply_laplacian(Spectrum& s) {
    for_each_mode(s, [](std::complex<double>& c, const Mode& m) { c *= -m.k2; });
}

void apply_helmholtz_inverse(Spectrum& s, double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw ParameterError("helmholtz kappa must be finite and >= 0 (got " + std::to_string(kappa) + ")");
    }
    for_each_mode(s, [kappa](std::complex<double>& c, const Mode& m) { c /= 1.0 + kappa * m.k2; });
}

void apply_two_thirds_filter(Spectrum& s) {
    for_each_mode(s, [](std::complex<double>& c, const Mode& m) {
        if (m.outside_2_3) c = {};
    });
}

double spectral_l2_norm(const Spectrum& s) {
    const GridSpec& g = s.grid();
    const std::size_t nkx = g.nkx();
    double sum = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < nkx; ++i) {
            // Interior columns stand for themselves and their conjugate twin.
            const double w = (i == 0 || i == g.nx / 2) ? 1.0 : 2.0;
            sum += w * std::norm(s(i, j));
        }
    }
    const double n = static_cast<double>(g.size());
    return std::sqrt(sum * g.lx * g.ly / (n * n));
}

namespace {

template <typename Kernel>
ScalarField spectral_op(const ScalarField& f, const char* name, Kernel&& kernel) {
    f.require_finite(name);
    Spectrum s = forward(f);
    kernel(s);
    return inverse(std::move(s));
}

}  // namespace

ScalarField ddx(const ScalarField& f) { return spectral_op(f, "ddx input", apply_ddx); }
ScalarField ddy(const ScalarField& f) { return spectral_op(f, "ddy input", apply_ddy); }
ScalarField laplacian(const ScalarField& f) { return spectral_op(f, "laplacian input", apply_laplacian); }

ScalarField helmholtz_solve(const ScalarField& f, double kappa) {
    return spectral_op(f, "helmholtz_solve input", [kappa](Spectrum& s) { apply_helmholtz_inverse(s, kappa); });
}

ScalarField dealias(const ScalarField& f) {
    return spectral_op(f, "dealias input", apply_two_thirds_filter);
}

}  // namespace bsq

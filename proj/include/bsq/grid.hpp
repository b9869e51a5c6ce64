#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace bsq {

/// Allocator returning 64-byte aligned storage so every buffer shares the
/// alignment FFTW planned with.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), alignment));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <typename U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using RealVector = std::vector<double, AlignedAllocator<double>>;
using ComplexVector = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

/// Doubly periodic rectangular grid. Samples sit at x0 + i*dx, y0 + j*dy and
/// are stored row-major with x varying fastest (index j*nx + i).
struct GridSpec {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    std::vector<double> kx;  // length nx, signed-frequency order
    std::vector<double> ky;  // length ny

    double dx() const { return lx / static_cast<double>(nx); }
    double dy() const { return ly / static_cast<double>(ny); }
    std::size_t size() const { return nx * ny; }
    double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx(); }
    double y(std::size_t j) const { return y0 + static_cast<double>(j) * dy(); }
    double cell_area() const { return dx() * dy(); }

    /// Number of complex coefficients per row of a real-to-complex spectrum.
    std::size_t nkx() const { return nx / 2 + 1; }
    std::size_t spectrum_size() const { return ny * nkx(); }

    /// Same sampling geometry (wavenumber tables follow from it).
    bool same_geometry(const GridSpec& other) const;
};

using GridPtr = std::shared_ptr<const GridSpec>;

/// Signed frequency index for position j of an n-point transform:
/// 0, 1, ..., n/2-1, -n/2, ..., -1.
long signed_frequency(std::size_t j, std::size_t n);

/// Builds a grid; throws ConfigError for odd or too small counts and
/// non-positive lengths.
GridPtr make_grid(std::size_t nx, std::size_t ny, double lx, double ly, double x0, double y0);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* context);

/// One real field sampled on a grid.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid, double value = 0.0);
    ScalarField(GridPtr grid, RealVector data);

    /// Samples f(x, y) at every grid point.
    static ScalarField from_function(GridPtr grid, const std::function<double(double, double)>& f);

    const GridSpec& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * grid_->nx + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * grid_->nx + i]; }
    double& operator[](std::size_t k) { return data_[k]; }
    double operator[](std::size_t k) const { return data_[k]; }

    bool all_finite() const;
    /// Throws NumericError naming `what` when a sample is NaN or Inf.
    void require_finite(const char* what) const;

    double max() const;
    double min() const;
    double max_abs() const;
    double mean() const;
    /// Riemann sum over the periodic cell, sum(f) * dx * dy.
    double integral() const;
    /// sqrt(sum(f^2) * dx * dy)
    double l2_norm() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(const ScalarField& o);
    ScalarField& operator*=(double s);
    ScalarField& operator+=(double s);

    /// this += s * o
    ScalarField& axpy(double s, const ScalarField& o);

private:
    GridPtr grid_;
    RealVector data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, double s);
ScalarField operator+(ScalarField a, double s);
ScalarField operator+(double s, ScalarField a);

double max_abs_difference(const ScalarField& a, const ScalarField& b);

}  // namespace bsq

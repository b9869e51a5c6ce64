#include "bsq/grid.hpp"

#include "bsq/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bsq {

bool GridSpec::same_geometry(const GridSpec& other) const {
    return nx == other.nx && ny == other.ny && lx == other.lx && ly == other.ly &&
           x0 == other.x0 && y0 == other.y0;
}

long signed_frequency(std::size_t j, std::size_t n) {
    const auto jj = static_cast<long>(j);
    const auto nn = static_cast<long>(n);
    return jj < nn / 2 ? jj : jj - nn;
}

namespace {

void check_count(std::size_t n, const char* name) {
    if (n % 2 != 0) {
        throw ConfigError(std::string(name) + " must be even (got " + std::to_string(n) + ")");
    }
    if (n < 8) {
        throw ConfigError(std::string(name) + " must be at least 8 (got " + std::to_string(n) + ")");
    }
}

std::vector<double> wavenumbers(std::size_t n, double length) {
    std::vector<double> k(n);
    const double scale = 2.0 * std::numbers::pi / length;
    for (std::size_t j = 0; j < n; ++j) k[j] = scale * static_cast<double>(signed_frequency(j, n));
    return k;
}

}  // namespace

GridPtr make_grid(std::size_t nx, std::size_t ny, double lx, double ly, double x0, double y0) {
    check_count(nx, "nx");
    check_count(ny, "ny");
    if (!(lx > 0.0) || !std::isfinite(lx)) throw ConfigError("lx must be positive and finite");
    if (!(ly > 0.0) || !std::isfinite(ly)) throw ConfigError("ly must be positive and finite");
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw ConfigError("x0, y0 must be finite");

    auto g = std::make_shared<GridSpec>();
    g->nx = nx;
    g->ny = ny;
    g->lx = lx;
    g->ly = ly;
    g->x0 = x0;
    g->y0 = y0;
    g->kx = wavenumbers(nx, lx);
    g->ky = wavenumbers(ny, ly);
    return g;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* context) {
    if (!a.same_geometry(b)) {
        throw UsageError(std::string(context) + ": fields live on different grids");
    }
}

ScalarField::ScalarField(GridPtr grid, double value)
    : grid_(std::move(grid)), data_(grid_->size(), value) {}

ScalarField::ScalarField(GridPtr grid, RealVector data) : grid_(std::move(grid)), data_(std::move(data)) {
    if (data_.size() != grid_->size()) {
        throw UsageError("field data length " + std::to_string(data_.size()) + " does not match grid size " +
                         std::to_string(grid_->size()));
    }
}

ScalarField ScalarField::from_function(GridPtr grid, const std::function<double(double, double)>& f) {
    ScalarField out(grid);
    for (std::size_t j = 0; j < grid->ny; ++j) {
        const double y = grid->y(j);
        for (std::size_t i = 0; i < grid->nx; ++i) out(i, j) = f(grid->x(i), y);
    }
    return out;
}

bool ScalarField::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void ScalarField::require_finite(const char* what) const {
    if (!all_finite()) throw NumericError(std::string("non-finite values in ") + what);
}

double ScalarField::max() const { return *std::max_element(data_.begin(), data_.end()); }
double ScalarField::min() const { return *std::min_element(data_.begin(), data_.end()); }

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::mean() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s / static_cast<double>(data_.size());
}

double ScalarField::integral() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s * grid_->cell_area();
}

double ScalarField::l2_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s * grid_->cell_area());
}

namespace {

void check_partner(const ScalarField& a, const ScalarField& b) {
    if (a.grid_ptr() != b.grid_ptr()) require_same_grid(a.grid(), b.grid(), "field arithmetic");
}

}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    check_partner(*this, o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    check_partner(*this, o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
    check_partner(*this, o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] *= o.data_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

ScalarField& ScalarField::operator+=(double s) {
    for (double& v : data_) v += s;
    return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
    check_partner(*this, o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator+(ScalarField a, double s) { return a += s; }
ScalarField operator+(double s, ScalarField a) { return a += s; }

double max_abs_difference(const ScalarField& a, const ScalarField& b) {
    check_partner(a, b);
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace bsq

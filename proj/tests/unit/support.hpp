#pragma once

#include "bsq/grid.hpp"
#include "bsq/model.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

namespace bsq::test {

inline constexpr double kPi = std::numbers::pi;

inline GridPtr unit_torus(std::size_t n) { return make_grid(n, n, 2 * kPi, 2 * kPi, 0.0, 0.0); }

inline GridPtr desk_grid(std::size_t n = 256) { return make_grid(n, n, 40.0, 40.0, -20.0, -20.0); }

inline ScalarField gaussian(const GridPtr& g, double width = 5.0) {
    return ScalarField::from_function(g, [&](double x, double y) { return std::exp(-(x * x + y * y) / width); });
}

/// Smooth random trigonometric polynomial with modes |f| <= max_mode.
inline ScalarField random_trig(const GridPtr& g, unsigned seed, int max_mode = 4) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    ScalarField f(g);
    const double cx = 2 * kPi / g->lx;
    const double cy = 2 * kPi / g->ly;
    for (int m = 0; m <= max_mode; ++m) {
        for (int n = -max_mode; n <= max_mode; ++n) {
            const double a = amp(rng);
            const double b = amp(rng);
            f += ScalarField::from_function(g, [&](double x, double y) {
                const double ph = m * cx * x + n * cy * y;
                return a * std::cos(ph) + b * std::sin(ph);
            });
        }
    }
    return f;
}

/// Swaps the roles of x and y: g(i, j) = f(j, i).
inline ScalarField transpose(const ScalarField& f) {
    ScalarField out(f.grid_ptr());
    for (std::size_t j = 0; j < f.grid().ny; ++j)
        for (std::size_t i = 0; i < f.grid().nx; ++i) out(i, j) = f(j, i);
    return out;
}

inline ModelParams study_params(double alpha = 0.3, double beta = 0.3) {
    return ModelParams::make(alpha, beta, 9.0 / 11.0, 0.0, 0.0);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("bsq_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace bsq::test

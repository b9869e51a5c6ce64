#include "support.hpp"

#include "bsq/error.hpp"
#include "bsq/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace bsq;
using namespace bsq::test;

namespace {

/// Centered difference in x with spacing m*dx on the periodic samples.
ScalarField centered_dx(const ScalarField& f, std::size_t m) {
    const GridSpec& g = f.grid();
    ScalarField out(f.grid_ptr());
    const double h = static_cast<double>(m) * g.dx();
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i)
            out(i, j) = (f((i + m) % g.nx, j) - f((i + g.nx - m) % g.nx, j)) / (2.0 * h);
    return out;
}

}  // namespace

TEST_CASE("make_grid dimensions and wavenumbers") {
    SUBCASE("full-scale grid has dx = 0.1") {
        const auto g = make_grid(400, 400, 40, 40, -20, -20);
        CHECK(g->dx() == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(g->dy() == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(g->x(0) == -20.0);
    }
    SUBCASE("canonical frequency order") {
        const auto g = make_grid(8, 8, 2 * kPi, 2 * kPi, 0, 0);
        const std::vector<double> expected{0, 1, 2, 3, -4, -3, -2, -1};
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(g->kx[i] == doctest::Approx(expected[i]).epsilon(1e-15));
            CHECK(g->ky[i] == doctest::Approx(expected[i]).epsilon(1e-15));
        }
    }
    SUBCASE("odd or tiny counts are rejected") {
        CHECK_THROWS_AS(make_grid(7, 8, 1, 1, 0, 0), ConfigError);
        CHECK_THROWS_WITH(make_grid(7, 8, 1, 1, 0, 0), doctest::Contains("nx must be even"));
        CHECK_THROWS_AS(make_grid(8, 9, 1, 1, 0, 0), ConfigError);
        CHECK_THROWS_AS(make_grid(6, 8, 1, 1, 0, 0), ConfigError);
        CHECK_THROWS_AS(make_grid(8, 8, 0, 1, 0, 0), ConfigError);
        CHECK_THROWS_AS(make_grid(8, 8, 1, -1, 0, 0), ConfigError);
    }
}

TEST_CASE("ddx and ddy on resolvable modes") {
    const auto g = make_grid(64, 48, 3.0, 5.0, -1.0, 0.5);
    const double cx = 2 * kPi / g->lx;
    const double cy = 2 * kPi / g->ly;

    const auto f = ScalarField::from_function(g, [&](double x, double) { return std::sin(3 * cx * x); });
    const auto fx = ScalarField::from_function(g, [&](double x, double) { return 3 * cx * std::cos(3 * cx * x); });
    CHECK(max_abs_difference(ddx(f), fx) <= 1e-12);
    CHECK(ddy(f).max_abs() <= 1e-12);

    const auto h = ScalarField::from_function(g, [&](double x, double y) { return std::cos(2 * cx * x + 5 * cy * y); });
    const auto hy =
        ScalarField::from_function(g, [&](double x, double y) { return -5 * cy * std::sin(2 * cx * x + 5 * cy * y); });
    CHECK(max_abs_difference(ddy(h), hy) <= 1e-12);

    SUBCASE("constants differentiate to exactly zero") {
        const ScalarField c(g, 5.0);
        const auto dcx = ddx(c);
        const auto dcy = ddy(c);
        for (std::size_t k = 0; k < c.size(); ++k) {
            CHECK(dcx[k] == 0.0);
            CHECK(dcy[k] == 0.0);
        }
    }
    SUBCASE("output has zero mean") {
        const auto r = random_trig(g, 7) + 3.0;
        CHECK(std::abs(ddx(r).mean()) <= 1e-13);
        CHECK(std::abs(ddy(r).mean()) <= 1e-13);
    }
    SUBCASE("Nyquist column is removed") {
        const auto nyq = ScalarField::from_function(g, [&](double x, double) { return std::cos(32 * cx * x); });
        CHECK(ddx(nyq).max_abs() <= 1e-12);
    }
}

TEST_CASE("ddx of a Gaussian against finite differences on the same samples") {
    const auto g = desk_grid(256);
    const auto f = gaussian(g);
    const auto spectral = ddx(f);
    const double h = g->dx();

    // Exact derivative as a sanity anchor.
    const auto exact = ScalarField::from_function(g, [](double x, double y) {
        return -2.0 * x / 5.0 * std::exp(-(x * x + y * y) / 5.0);
    });
    CHECK(max_abs_difference(spectral, exact) <= 1e-12);

    // Second-order centered differences: the gap is the oracle's own truncation
    // error, bounded by h^2/6 max|f'''| (max|f'''| = 0.3488 for this width).
    const auto d1 = centered_dx(f, 1);
    const double gap = max_abs_difference(spectral, d1);
    CHECK(gap <= h * h / 6.0 * 0.3488 * 1.001);

    // Richardson combination of spacings h and 2h removes the h^2 term.
    const auto d2 = centered_dx(f, 2);
    const auto richardson = (4.0 / 3.0) * d1 - (1.0 / 3.0) * d2;
    CHECK(max_abs_difference(spectral, richardson) <= 1e-3);

    // Halving h shrinks the gap fourfold.
    const auto fine = desk_grid(512);
    const auto ff = gaussian(fine);
    const double fine_gap = max_abs_difference(ddx(ff), centered_dx(ff, 1));
    CHECK(gap / fine_gap == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("laplacian") {
    const auto g = unit_torus(32);
    const auto c = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
    CHECK(max_abs_difference(laplacian(c), -1.0 * c) <= 1e-12);
    CHECK(laplacian(ScalarField(g, 2.5)).max_abs() == 0.0);

    const auto d = desk_grid(128);
    const auto f = gaussian(d);
    const auto composed = ddx(ddx(f)) + ddy(ddy(f));
    CHECK(max_abs_difference(laplacian(f), composed) <= 1e-10);
}

TEST_CASE("derivatives commute") {
    const auto g = desk_grid(128);
    const auto f = gaussian(g, 3.0);
    CHECK(max_abs_difference(ddx(ddy(f)), ddy(ddx(f))) <= 1e-11);
}

TEST_CASE("helmholtz_solve") {
    const auto g = unit_torus(32);
    const auto c = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
    CHECK(max_abs_difference(helmholtz_solve(c, 0.25), (1.0 / 1.25) * c) <= 1e-12);

    SUBCASE("kappa = 0 is the identity") {
        const auto r = random_trig(g, 3, 10);
        CHECK(max_abs_difference(helmholtz_solve(r, 0.0), r) <= 1e-13 * std::max(1.0, r.max_abs()));
    }
    SUBCASE("manufactured Gaussian solution") {
        const auto d = desk_grid(256);
        const auto u = gaussian(d);
        for (double kappa : {0.01, 0.3 / 11.0, 0.3 * 8.0 / 33.0, 1.0, 7.5}) {
            const auto f = u - kappa * laplacian(u);
            CHECK(max_abs_difference(helmholtz_solve(f, kappa), u) <= 1e-11);
        }
    }
    SUBCASE("mean is preserved") {
        const auto r = random_trig(g, 11) + 0.75;
        CHECK(helmholtz_solve(r, 3.0).mean() == doctest::Approx(r.mean()).epsilon(1e-13));
    }
    SUBCASE("negative kappa is rejected") {
        CHECK_THROWS_AS(helmholtz_solve(c, -0.1), ParameterError);
    }
}

TEST_CASE("dealias keeps low modes and removes the top third") {
    const auto g = unit_torus(64);
    const auto low = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
    CHECK(max_abs_difference(dealias(low), low) <= 1e-13);

    const auto high = ScalarField::from_function(g, [](double x, double) { return std::cos(31.0 * x); });
    CHECK(dealias(high).max_abs() <= 1e-13);

    // 21 = floor(64/3) is the last surviving index.
    const auto edge = ScalarField::from_function(g, [](double x, double y) { return std::sin(21.0 * x + 21.0 * y); });
    CHECK(max_abs_difference(dealias(edge), edge) <= 1e-12);
    const auto cut = ScalarField::from_function(g, [](double x, double y) { return std::sin(x + 22.0 * y); });
    CHECK(dealias(cut).max_abs() <= 1e-12);

    const auto r = random_trig(g, 5, 30);
    const auto once = dealias(r);
    const auto twice = dealias(once);
    CHECK(max_abs_difference(twice, once) <= 1e-14 * std::max(1.0, once.max_abs()));
}

TEST_CASE("transform round trip and Parseval") {
    for (std::size_t n : {8u, 64u, 256u}) {
        const auto g = make_grid(n, n / 2 + 8, 7.0, 3.0, 0.0, 0.0);
        const auto r = random_trig(g, static_cast<unsigned>(n), 3);
        const auto back = inverse(forward(r));
        CHECK(max_abs_difference(back, r) <= 1e-13 * r.max_abs());
        CHECK(spectral_l2_norm(forward(r)) == doctest::Approx(r.l2_norm()).epsilon(1e-12));
    }
}

TEST_CASE("non-finite input is a numeric error") {
    const auto g = unit_torus(16);
    ScalarField f(g, 1.0);
    f(3, 4) = std::nan("");
    CHECK_THROWS_AS(ddx(f), NumericError);
    CHECK_THROWS_AS(laplacian(f), NumericError);
    CHECK_THROWS_AS(helmholtz_solve(f, 1.0), NumericError);
}

TEST_CASE("mismatched grids are rejected") {
    const auto a = unit_torus(16);
    const auto b = unit_torus(32);
    ScalarField fa(a, 1.0);
    ScalarField fb(b, 1.0);
    CHECK_THROWS_AS(fa += fb, UsageError);
}

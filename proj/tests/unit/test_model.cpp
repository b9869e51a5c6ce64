#include "support.hpp"

#include "bsq/error.hpp"
#include "bsq/model.hpp"
#include "bsq/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace bsq;
using namespace bsq::test;

TEST_CASE("derive_abcd") {
    SUBCASE("level 9/11 with zero weights") {
        const auto k = derive_abcd(9.0 / 11.0, 0.0, 0.0);
        CHECK(k.a == 0.0);
        CHECK(k.b == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
        CHECK(k.c == 0.0);
        CHECK(k.d == doctest::Approx(8.0 / 33.0).epsilon(1e-15));
    }
    SUBCASE("theta2 = 1/3 kills c and d") {
        const auto k = derive_abcd(1.0 / 3.0, 0.5, 0.5);
        CHECK(k.a == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
        CHECK(k.b == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
        CHECK(std::abs(k.c) <= 1e-17);
        CHECK(std::abs(k.d) <= 1e-17);
    }
    SUBCASE("theta2 = 1 kills a and b") {
        const auto k = derive_abcd(1.0, 1.0, 0.7);
        CHECK(k.a == 0.0);
        CHECK(k.b == 0.0);
        CHECK(k.c == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(k.d == 0.0);
    }
    SUBCASE("pair sums are fixed by theta2") {
        for (double t : {0.4, 0.6, 9.0 / 11.0, 0.95}) {
            for (double w : {0.0, 0.25, 0.5, 1.0}) {
                const auto k = derive_abcd(t, w, 1.0 - w);
                CHECK(k.a + k.b == doctest::Approx(0.5 * (1 - t)).epsilon(1e-15));
                CHECK(k.c + k.d == doctest::Approx(0.5 * (t - 1.0 / 3.0)).epsilon(1e-15));
            }
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(derive_abcd(1.2, 0, 0), ParameterError);
        CHECK_THROWS_AS(derive_abcd(-0.1, 0, 0), ParameterError);
        CHECK_THROWS_AS(derive_abcd(0.2, 0.0, 0.0), UnsupportedRegimeError);
        CHECK_THROWS_AS(derive_abcd(0.5, 0.0, 2.0), UnsupportedRegimeError);
        CHECK_THROWS_AS(derive_abcd(0.5, 1.5, 0.0), UnsupportedRegimeError);
    }
}

TEST_CASE("ModelParams validation") {
    CHECK_NOTHROW(ModelParams::make(0.3, 0.3, 9.0 / 11.0, 0, 0));
    CHECK_THROWS_AS(ModelParams::make(1.5, 0.3, 9.0 / 11.0, 0, 0), ParameterError);
    CHECK_THROWS_AS(ModelParams::make(0.3, -0.1, 9.0 / 11.0, 0, 0), ParameterError);
    CHECK_THROWS_AS(ModelParams::make(std::nan(""), 0.3, 9.0 / 11.0, 0, 0), ParameterError);
    CHECK(study_params().level_coefficient() == doctest::Approx(0.5 * (9.0 / 11.0 - 1.0 / 3.0)));
}

TEST_CASE("rhs of trivial states") {
    const auto g = unit_torus(32);
    const auto p = study_params();
    const auto z = rhs(State::zero(g), p);
    for (std::size_t k = 0; k < g->size(); ++k) {
        CHECK(z.eta_t[k] == 0.0);
        CHECK(z.u_t[k] == 0.0);
        CHECK(z.v_t[k] == 0.0);
    }

    State flat = State::zero(g);
    flat.eta = ScalarField(g, 0.4);
    const auto f = rhs(flat, p);
    CHECK(f.eta_t.max_abs() <= 1e-15);
    CHECK(f.u_t.max_abs() <= 1e-15);
    CHECK(f.v_t.max_abs() <= 1e-15);
}

TEST_CASE("linearized single mode") {
    const auto g = unit_torus(32);
    const auto p = ModelParams::make(0.3, 0.3, 0.6, 0.3, 0.4, true);
    for (double kx : {1.0, 3.0}) {
        State s = State::zero(g);
        s.eta = ScalarField::from_function(g, [&](double x, double) { return std::cos(kx * x); });
        const auto r = rhs(s, p);
        const double K = kx * kx;
        const double gain = kx * (1 - p.beta * p.a() * K) / (1 + p.beta * p.b() * K);
        const auto expected = ScalarField::from_function(g, [&](double x, double) { return gain * std::sin(kx * x); });
        CHECK(r.eta_t.max_abs() <= 1e-14);
        CHECK(r.v_t.max_abs() <= 1e-14);
        CHECK(max_abs_difference(r.u_t, expected) <= 1e-13);
    }
}

TEST_CASE("nonlinear terms on a two-harmonic state") {
    // eta = U = cos x, V = 0. Products are cos^2 x = (1 + cos 2x)/2, which the
    // hand evaluation below carries through the Helmholtz inversions.
    const auto g = unit_torus(32);
    const auto p = ModelParams::make(0.2, 0.3, 0.6, 0.3, 0.4);
    State s = State::zero(g);
    s.eta = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
    s.u = s.eta;
    const auto r = rhs(s, p);

    const double B = p.beta;
    const auto u_t = ScalarField::from_function(g, [&](double x, double) {
        return std::sin(x) * (1 - B * p.a()) / (1 + B * p.b()) + 0.5 * p.alpha * std::sin(2 * x) / (1 + 4 * B * p.b());
    });
    const auto eta_t = ScalarField::from_function(g, [&](double x, double) {
        return std::sin(x) * (1 - B * p.c()) / (1 + B * p.d()) + p.alpha * std::sin(2 * x) / (1 + 4 * B * p.d());
    });
    CHECK(max_abs_difference(r.u_t, u_t) <= 1e-13);
    CHECK(max_abs_difference(r.eta_t, eta_t) <= 1e-13);
    CHECK(r.v_t.max_abs() <= 1e-14);

    SUBCASE("linearized drops the alpha terms") {
        auto lin = p;
        lin.linearized = true;
        const auto rl = rhs(s, lin);
        const auto ul = ScalarField::from_function(
            g, [&](double x, double) { return std::sin(x) * (1 - B * p.a()) / (1 + B * p.b()); });
        CHECK(max_abs_difference(rl.u_t, ul) <= 1e-13);
    }
}

TEST_CASE("eta tendency has zero mean") {
    const auto g = desk_grid(64);
    const auto p = study_params();
    State s = State::zero(g);
    s.eta = random_trig(g, 1, 6) * 0.2 + 0.1;
    s.u = random_trig(g, 2, 6) * 0.2;
    s.v = random_trig(g, 3, 6) * 0.2;
    const auto r = rhs(s, p);
    CHECK(std::abs(r.eta_t.mean()) <= 1e-13);
}

TEST_CASE("rhs commutes with a quarter-turn of the axes") {
    const auto g = desk_grid(64);
    const auto p = study_params();
    State s = State::zero(g);
    s.eta = ScalarField::from_function(g, [](double x, double y) { return std::exp(-((x - 1) * (x - 1) + 2 * y * y) / 5); });
    s.u = ScalarField::from_function(g, [](double x, double y) { return 0.3 * std::exp(-(x * x + (y + 2) * (y + 2)) / 4); });
    s.v = ScalarField::from_function(g, [](double x, double y) { return -0.2 * x * std::exp(-(x * x + y * y) / 6); });

    State t = State::zero(g);
    t.eta = transpose(s.eta);
    t.u = transpose(s.v);
    t.v = transpose(s.u);

    const auto rs = rhs(s, p);
    const auto rt = rhs(t, p);
    CHECK(max_abs_difference(rt.eta_t, transpose(rs.eta_t)) <= 1e-12);
    CHECK(max_abs_difference(rt.u_t, transpose(rs.v_t)) <= 1e-12);
    CHECK(max_abs_difference(rt.v_t, transpose(rs.u_t)) <= 1e-12);
}

TEST_CASE("rhs rejects non-finite states and mixed grids") {
    const auto g = unit_torus(16);
    State s = State::zero(g);
    s.u(1, 1) = INFINITY;
    CHECK_THROWS_AS(rhs(s, study_params()), NumericError);

    State m = State::zero(g);
    m.v = ScalarField(unit_torus(32));
    CHECK_THROWS_AS(rhs(m, study_params()), UsageError);
}

TEST_CASE("dispersion_omega") {
    const auto p = study_params(0.3, 0.3);
    CHECK(dispersion_omega(1.0, 0.0, p).omega == doctest::Approx(0.952604).epsilon(1e-6));
    CHECK(dispersion_omega(0.0, 1.0, p).omega == doctest::Approx(0.952604).epsilon(1e-6));
    CHECK(dispersion_omega(0.0, 0.0, p).omega == 0.0);
    CHECK_FALSE(dispersion_omega(0.0, 0.0, p).unstable);

    const auto shallow = ModelParams::make(0.3, 0.0, 9.0 / 11.0, 0, 0);
    CHECK(dispersion_omega(0.6, 0.8, shallow).omega == doctest::Approx(1.0).epsilon(1e-15));
    const auto tiny = ModelParams::make(0.3, 1e-9, 9.0 / 11.0, 0, 0);
    CHECK(dispersion_omega(1.0, 0.0, tiny).omega == doctest::Approx(1.0).epsilon(1e-8));

    SUBCASE("unstable modes are signalled, not NaN") {
        // a > 0 makes the numerator change sign at |k|^2 = 1/(beta a).
        const auto q = ModelParams::make(0.3, 0.5, 0.5, 0.0, 1.0);
        const double kc = std::sqrt(1.0 / (q.beta * q.a()));
        const auto below = dispersion_omega(0.9 * kc, 0.0, q);
        const auto above = dispersion_omega(1.1 * kc, 0.0, q);
        CHECK_FALSE(below.unstable);
        CHECK(below.omega > 0.0);
        CHECK(above.unstable);
        CHECK(above.omega == 0.0);
    }
}

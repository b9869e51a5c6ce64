#include "bsq/model.hpp"

#include "bsq/error.hpp"
#include "bsq/spectral.hpp"

#include <cmath>
#include <string>

namespace bsq {

Coefficients derive_abcd(double theta2, double lambda, double mu) {
    if (!(theta2 >= 0.0 && theta2 <= 1.0)) {
        throw ParameterError("theta2 must lie in [0, 1] (got " + std::to_string(theta2) + ")");
    }
    if (!std::isfinite(lambda) || !std::isfinite(mu)) throw ParameterError("lambda and mu must be finite");

    const double h = 0.5 * (1.0 - theta2);
    const double g = 0.5 * (theta2 - 1.0 / 3.0);
    Coefficients k{h * mu, h * (1.0 - mu), g * lambda, g * (1.0 - lambda)};
    if (k.b < 0.0) {
        throw UnsupportedRegimeError("b = " + std::to_string(k.b) +
                                     " < 0: (1 - beta b Laplacian) is not invertible for this (theta2, mu)");
    }
    if (k.d < 0.0) {
        throw UnsupportedRegimeError("d = " + std::to_string(k.d) +
                                     " < 0: (1 - beta d Laplacian) is not invertible for this (theta2, lambda)");
    }
    return k;
}

ModelParams ModelParams::make(double alpha, double beta, double theta2, double lambda, double mu,
                              bool linearized, bool dealias) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ParameterError("alpha must lie in [0, 1] (got " + std::to_string(alpha) + ")");
    }
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw ParameterError("beta must lie in [0, 1] (got " + std::to_string(beta) + ")");
    }
    ModelParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.theta2 = theta2;
    p.lambda = lambda;
    p.mu = mu;
    p.coeffs = derive_abcd(theta2, lambda, mu);
    p.linearized = linearized;
    p.dealias = dealias;
    return p;
}

State State::zero(const GridPtr& grid, double t) {
    return State{ScalarField(grid), ScalarField(grid), ScalarField(grid), t};
}

void State::check_consistent() const {
    require_same_grid(eta.grid(), u.grid(), "State");
    require_same_grid(eta.grid(), v.grid(), "State");
}

bool State::all_finite() const { return eta.all_finite() && u.all_finite() && v.all_finite(); }

bool State::positive_depth(double alpha) const { return 1.0 + alpha * eta.min() > 0.0; }

Tendency rhs(const State& s, const ModelParams& p) {
    s.check_consistent();
    s.eta.require_finite("state eta");
    s.u.require_finite("state U");
    s.v.require_finite("state V");

    const GridPtr& grid = s.eta.grid_ptr();
    const Spectrum eta_hat = forward(s.eta);
    const Spectrum u_hat = forward(s.u);
    const Spectrum v_hat = forward(s.v);

    Spectrum kinetic_hat(grid);  // (U^2 + V^2)^
    Spectrum flux_x_hat(grid);   // (eta U)^
    Spectrum flux_y_hat(grid);   // (eta V)^
    const bool nonlinear = !p.linearized && p.alpha != 0.0;
    if (nonlinear) {
        ScalarField kinetic = s.u * s.u + s.v * s.v;
        ScalarField flux_x = s.eta * s.u;
        ScalarField flux_y = s.eta * s.v;
        kinetic.require_finite("nonlinear term U^2 + V^2");
        flux_x.require_finite("nonlinear term eta U");
        flux_y.require_finite("nonlinear term eta V");
        kinetic_hat = forward(kinetic);
        flux_x_hat = forward(flux_x);
        flux_y_hat = forward(flux_y);
        if (p.dealias) {
            apply_two_thirds_filter(kinetic_hat);
            apply_two_thirds_filter(flux_x_hat);
            apply_two_thirds_filter(flux_y_hat);
        }
    }

    const double beta = p.beta;
    const double half_alpha = 0.5 * p.alpha;
    const double alpha = p.alpha;
    const auto& k = p.coeffs;

    Spectrum eta_t(grid);
    Spectrum u_t(grid);
    Spectrum v_t(grid);
    auto et = eta_t.coeffs();
    auto ut = u_t.coeffs();
    auto vt = v_t.coeffs();
    const auto eh = eta_hat.coeffs();
    const auto uh = u_hat.coeffs();
    const auto vh = v_hat.coeffs();
    const auto kh = kinetic_hat.coeffs();
    const auto fxh = flux_x_hat.coeffs();
    const auto fyh = flux_y_hat.coeffs();

    const std::complex<double> I(0.0, 1.0);
    std::size_t idx = 0;
    // Walk the modes with a dummy spectrum to reuse the mode bookkeeping.
    for_each_mode(eta_t, [&](std::complex<double>&, const Mode& m) {
        const std::size_t n = idx++;
        const std::complex<double> ikx = m.x_nyquist ? 0.0 : I * m.kx;
        const std::complex<double> iky = m.y_nyquist ? 0.0 : I * m.ky;
        const double K = m.k2;

        const std::complex<double> pressure = eh[n] * (1.0 - beta * k.a * K) + half_alpha * kh[n];
        const double inv_b = 1.0 / (1.0 + beta * k.b * K);
        ut[n] = -ikx * pressure * inv_b;
        vt[n] = -iky * pressure * inv_b;

        const std::complex<double> div = ikx * uh[n] + iky * vh[n];
        const std::complex<double> div_flux = ikx * fxh[n] + iky * fyh[n];
        et[n] = -(div * (1.0 - beta * k.c * K) + alpha * div_flux) / (1.0 + beta * k.d * K);
    });

    Tendency out{inverse(std::move(eta_t)), inverse(std::move(u_t)), inverse(std::move(v_t))};
    out.eta_t.require_finite("eta_t");
    out.u_t.require_finite("u_t");
    out.v_t.require_finite("v_t");
    return out;
}

DispersionRoot dispersion_omega(double kx, double ky, const ModelParams& p) {
    const double K = kx * kx + ky * ky;
    const auto& k = p.coeffs;
    const double num = K * (1.0 - p.beta * k.a * K) * (1.0 - p.beta * k.c * K);
    const double den = (1.0 + p.beta * k.b * K) * (1.0 + p.beta * k.d * K);
    const double omega2 = num / den;
    if (omega2 < 0.0) return {0.0, true};
    return {std::sqrt(omega2), false};
}

}  // namespace bsq

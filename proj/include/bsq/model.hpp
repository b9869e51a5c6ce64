#pragma once

#include "bsq/grid.hpp"

namespace bsq {

/// Dispersion coefficients of the a-b-c-d system.
struct Coefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

/// a = (1-theta2)mu/2, b = (1-theta2)(1-mu)/2,
/// c = (theta2-1/3)lambda/2, d = (theta2-1/3)(1-lambda)/2.
///
/// Throws ParameterError when theta2 is outside [0,1] and
/// UnsupportedRegimeError when b or d comes out negative.
Coefficients derive_abcd(double theta2, double lambda, double mu);

/// Parameters of one member of the family, in non-dimensional form.
struct ModelParams {
    double alpha = 0.0;   // nonlinearity A/h0
    double beta = 0.0;    // dispersion h0^2/l^2
    double theta2 = 0.0;  // squared level of the velocity variable
    double lambda = 0.0;
    double mu = 0.0;
    Coefficients coeffs;
    bool linearized = false;
    /// Apply the 2/3 rule to the quadratic products in rhs.
    bool dealias = true;

    /// Validates inputs and derives a, b, c, d.
    static ModelParams make(double alpha, double beta, double theta2, double lambda, double mu,
                            bool linearized = false, bool dealias = true);

    double a() const { return coeffs.a; }
    double b() const { return coeffs.b; }
    double c() const { return coeffs.c; }
    double d() const { return coeffs.d; }

    /// (theta2 - 1/3)/2, the coefficient shared by the balance-law densities.
    double level_coefficient() const { return 0.5 * (theta2 - 1.0 / 3.0); }
};

/// Solution triple (eta, U, V) at time t.
struct State {
    ScalarField eta;
    ScalarField u;
    ScalarField v;
    double t = 0.0;

    static State zero(const GridPtr& grid, double t = 0.0);
    const GridSpec& grid() const { return eta.grid(); }

    /// Throws UsageError if the three fields do not share a grid.
    void check_consistent() const;
    bool all_finite() const;
    /// 1 + alpha * min(eta) > 0
    bool positive_depth(double alpha) const;
};

struct Tendency {
    ScalarField eta_t;
    ScalarField u_t;
    ScalarField v_t;
};

/// Time derivatives of (eta, U, V) from the a-b-c-d system with the
/// higher-order remainders dropped. The implicit (1 - beta*b*Laplacian) and
/// (1 - beta*d*Laplacian) operators are inverted spectrally.
Tendency rhs(const State& s, const ModelParams& p);

/// Result of the linear dispersion relation; `unstable` is set when
/// omega^2 < 0 for the requested wavenumber, in which case omega is 0.
struct DispersionRoot {
    double omega = 0.0;
    bool unstable = false;
};

/// omega^2 = |k|^2 (1 - beta a |k|^2)(1 - beta c |k|^2) / ((1 + beta b |k|^2)(1 + beta d |k|^2))
DispersionRoot dispersion_omega(double kx, double ky, const ModelParams& p);

}  // namespace bsq

#pragma once

#include "bsq/diagnostics.hpp"
#include "bsq/integrator.hpp"

#include <span>
#include <string>
#include <vector>

namespace bsq {

/// Everything recorded while running one configuration with the full set of
/// balance-law and wave diagnostics attached.
struct StudyResult {
    double alpha = 0.0;
    double beta = 0.0;
    ResidualSeries residuals;
    AmplitudeTrack amplitude;
    /// max over samples of |grid integral of the mass residual field|
    double max_mass_residual_integral = 0.0;
    /// max over samples of |int eta(t) - int eta(0)| / |int eta(0)|
    double max_mass_drift = 0.0;
    /// NaN when the fit window holds fewer than five crest samples.
    double decay_exponent = 0.0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;
    bool blew_up = false;
    std::string message;
};

StudyResult run_balance_study(const SimConfig& cfg);

/// One study per value, with alpha = beta = value. Runs up to `threads`
/// configurations concurrently; results keep the order of `values`.
std::vector<StudyResult> run_sweep(const SimConfig& base, std::span<const double> values, unsigned threads = 1);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct SweepSlopes {
    double mass = 0.0;
    double momentum = 0.0;
    double energy = 0.0;
};

SweepSlopes sweep_slopes(std::span<const StudyResult> rows, MomentumCombine how = MomentumCombine::Max);

}  // namespace bsq

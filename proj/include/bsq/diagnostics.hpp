#pragma once

#include "bsq/grid.hpp"
#include "bsq/integrator.hpp"
#include "bsq/model.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace bsq {

// ---------------------------------------------------------------------------
// Mechanical balance laws
//
// Each residual is  d/dt(density) + d/dx(flux_x) + d/dy(flux_y)  evaluated on
// a pair of samples (prev, cur) separated by dt_s. Time derivatives of the
// densities are forward differences; fluxes are taken at `prev`. Mixed
// derivatives such as U_xt are differenced in time first and then
// differentiated spectrally.
//
//   mass:      M   = 1 + alpha eta
//              q_x = U (alpha + alpha^2 eta) + alpha beta g Lap U
//   momentum:  I_x = (1 + alpha eta) U + beta g Lap U
//              F_xx = eta + alpha U^2 + alpha/2 eta^2 - beta/3 (U_xt + V_yt),  F_xy = alpha U V
//   energy:    E   = (U^2 + V^2 + eta^2)/2 + beta g (U Lap U + V Lap V)
//                    + beta/6 (U_x + V_y)^2 + alpha/2 eta (U^2 + V^2)
//              q_Ex = alpha/2 (U^3 + V^2 U) + alpha eta^2 U + eta U
//                    + beta g eta Lap U - beta/3 U (U_xt + V_yt)
//
// with g = (theta2 - 1/3)/2. The constant 1/2 inside the momentum flux has no
// spatial derivative and is left out.
// ---------------------------------------------------------------------------

enum class TimeDerivative {
    /// Forward differences of the two stored samples.
    ForwardDifference,
    /// Exact semi-discrete derivatives from rhs(prev); `cur` only supplies the grid.
    Semidiscrete,
};

struct BalanceFields {
    ScalarField mass;
    ScalarField momentum_x;
    ScalarField momentum_y;
    ScalarField energy;
};

BalanceFields balance_residuals(const State& prev, const State& cur, double dt_s, const ModelParams& p,
                                TimeDerivative mode = TimeDerivative::ForwardDifference);

ScalarField mass_residual(const State& prev, const State& cur, double dt_s, const ModelParams& p);
ScalarField momentum_residual_x(const State& prev, const State& cur, double dt_s, const ModelParams& p);
ScalarField momentum_residual_y(const State& prev, const State& cur, double dt_s, const ModelParams& p);
ScalarField energy_residual(const State& prev, const State& cur, double dt_s, const ModelParams& p);

/// L-infinity (and L2) reductions of the four residual fields at time t.
struct BalanceSample {
    double t = 0.0;
    double r_mass = 0.0;
    double r_momx = 0.0;
    double r_momy = 0.0;
    double r_energy = 0.0;

    double l2_mass = 0.0;
    double l2_momx = 0.0;
    double l2_momy = 0.0;
    double l2_energy = 0.0;
};

BalanceSample reduce(const BalanceFields& fields, double t);

/// How the x and y momentum residuals are merged into one column.
enum class MomentumCombine { Max, Sum, Norm };

double combine_momentum(double momx, double momy, MomentumCombine how);

class ResidualSeries {
public:
    /// Appends a sample; timestamps must increase strictly.
    void add(const BalanceSample& s);

    const std::vector<BalanceSample>& samples() const { return samples_; }
    bool empty() const { return samples_.empty(); }

    /// Componentwise maximum over all samples (t holds the last timestamp).
    const BalanceSample& summary() const { return summary_; }
    double momentum_summary(MomentumCombine how = MomentumCombine::Max) const;

private:
    std::vector<BalanceSample> samples_;
    BalanceSample summary_;
};

/// Observer that evaluates all four residuals at each diagnostic sample.
/// The sample is stamped with prev.t, where the forward difference sits.
Observer residual_observer(ResidualSeries& series, const ModelParams& p);

/// Grid integral of the mass residual for every sample, recorded separately
/// so the global mass identity can be checked.
Observer mass_integral_observer(std::vector<double>& integrals, const ModelParams& p);

// ---------------------------------------------------------------------------
// Leading expanding wave
// ---------------------------------------------------------------------------

struct WavePeak {
    double radius = 0.0;
    double amplitude = 0.0;
};

/// Disk around the center excluded from crest detection; 0 up to t = 1,
/// then 1.
double default_exclusion_radius(double t);

/// Outermost local maximum of eta along the ray from the domain center in
/// the +x direction, beyond `r_min` and above `rel_threshold` times the
/// largest value on that part of the ray. Off-grid samples are bilinearly
/// interpolated; the crest is refined with a three-point parabola.
/// Returns nullopt when there is no such maximum (flat field).
std::optional<WavePeak> leading_wave_amplitude(const State& s, double r_min, double rel_threshold = 0.05);
std::optional<WavePeak> leading_wave_amplitude(const State& s);

struct AmplitudeTrack {
    std::vector<double> times;
    std::vector<double> radii;
    std::vector<double> amplitudes;
    double t_lo = 4.0;
    double t_hi = 10.0;

    void add(double t, const WavePeak& peak);
};

/// Least-squares slope of log(amplitude) against log(t) over samples with
/// t_lo <= t <= t_hi. Needs at least five samples there.
double fit_decay_exponent(const AmplitudeTrack& track);

/// Observer recording the leading crest of the current sample.
Observer amplitude_observer(AmplitudeTrack& track);

// ---------------------------------------------------------------------------
// Kinematics and pressure in the fluid column
// ---------------------------------------------------------------------------

struct VelocityPair {
    ScalarField u;
    ScalarField v;
};

/// Maps (U, V) given at level theta_from to level theta_to: first to the
/// bottom velocity with (1 + t/2 beta Lap + 5t^2/24 beta^2 Lap^2), then up
/// with (1 - t/2 beta Lap + t^2/24 beta^2 Lap^2), where t is the squared
/// level. Both maps are truncated at beta^2.
VelocityPair reconstruct_velocity_at_level(const State& s, const ModelParams& p, double theta_from2,
                                           double theta_to2);

/// P' = eta + beta/2 (z^2 - 1)(U_xt + V_yt) at height z above the bed,
/// with the time derivatives taken from (prev, s).
ScalarField dynamic_pressure(const State& s, const ModelParams& p, double z, const State& prev, double dt_s);

// ---------------------------------------------------------------------------
// Dimensional values
// ---------------------------------------------------------------------------

enum class QuantityKind { LengthX, LengthY, Elevation, Velocity, Time };

/// Throws UsageError for unknown names.
QuantityKind parse_quantity_kind(std::string_view name);

struct PhysicalScales {
    double h0 = 1.0;  // undisturbed depth
    double g = 9.81;
    double amplitude = 1.0;   // A
    double wavelength = 1.0;  // l
};

/// Undoes the scaling x~ = x/l, eta~ = eta/A, t~ = sqrt(g h0) t / l.
/// Horizontal velocities scale with A sqrt(g/h0).
double dimensionalize(double value, QuantityKind kind, const PhysicalScales& scales);

}  // namespace bsq

#include "bsq/diagnostics.hpp"

#include "bsq/error.hpp"
#include "bsq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bsq {

namespace {

/// d/dx fx + d/dy fy in one spectral pass.
ScalarField divergence(const ScalarField& fx, const ScalarField& fy) {
    Spectrum sx = forward(fx);
    Spectrum sy = forward(fy);
    apply_ddx(sx);
    apply_ddy(sy);
    sx += sy;
    return inverse(std::move(sx));
}

/// Spatial quantities of one sample shared by several densities and fluxes.
struct Kinematics {
    ScalarField lap_u;
    ScalarField lap_v;
    ScalarField div;  // U_x + V_y

    explicit Kinematics(const State& s) {
        const Spectrum u_hat = forward(s.u);
        const Spectrum v_hat = forward(s.v);
        Spectrum lu = u_hat;
        Spectrum lv = v_hat;
        apply_laplacian(lu);
        apply_laplacian(lv);
        lap_u = inverse(std::move(lu));
        lap_v = inverse(std::move(lv));
        Spectrum ux = u_hat;
        Spectrum vy = v_hat;
        apply_ddx(ux);
        apply_ddy(vy);
        ux += vy;
        div = inverse(std::move(ux));
    }
};

struct Densities {
    ScalarField momentum_x;
    ScalarField momentum_y;
    ScalarField energy;
};

Densities densities(const State& s, const Kinematics& k, const ModelParams& p) {
    const double alpha = p.alpha;
    const double beta = p.beta;
    const double g = p.level_coefficient();
    const std::size_t n = s.eta.size();

    Densities d{ScalarField(s.eta.grid_ptr()), ScalarField(s.eta.grid_ptr()), ScalarField(s.eta.grid_ptr())};
    for (std::size_t i = 0; i < n; ++i) {
        const double eta = s.eta[i];
        const double u = s.u[i];
        const double v = s.v[i];
        const double depth = 1.0 + alpha * eta;
        const double q2 = u * u + v * v;
        d.momentum_x[i] = depth * u + beta * g * k.lap_u[i];
        d.momentum_y[i] = depth * v + beta * g * k.lap_v[i];
        d.energy[i] = 0.5 * (q2 + eta * eta) + beta * g * (u * k.lap_u[i] + v * k.lap_v[i]) +
                      beta / 6.0 * k.div[i] * k.div[i] + 0.5 * alpha * eta * q2;
    }
    return d;
}

/// Time derivatives of the densities plus the field U_xt + V_yt.
struct Rates {
    ScalarField mass;
    ScalarField momentum_x;
    ScalarField momentum_y;
    ScalarField energy;
    ScalarField div_t;
};

Rates forward_difference_rates(const State& prev, const State& cur, double dt_s, const Kinematics& kp,
                               const ModelParams& p) {
    const Kinematics kc(cur);
    const Densities dp = densities(prev, kp, p);
    const Densities dc = densities(cur, kc, p);
    const double inv = 1.0 / dt_s;

    ScalarField u_t = (cur.u - prev.u) * inv;
    ScalarField v_t = (cur.v - prev.v) * inv;
    return Rates{
        p.alpha * inv * (cur.eta - prev.eta),
        (dc.momentum_x - dp.momentum_x) * inv,
        (dc.momentum_y - dp.momentum_y) * inv,
        (dc.energy - dp.energy) * inv,
        divergence(u_t, v_t),
    };
}

Rates semidiscrete_rates(const State& prev, const Kinematics& k, const ModelParams& p) {
    const Tendency tend = rhs(prev, p);
    const double alpha = p.alpha;
    const double beta = p.beta;
    const double g = p.level_coefficient();

    const ScalarField lap_ut = laplacian(tend.u_t);
    const ScalarField lap_vt = laplacian(tend.v_t);
    ScalarField div_t = divergence(tend.u_t, tend.v_t);

    const GridPtr& grid = prev.eta.grid_ptr();
    Rates r{ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid), std::move(div_t)};
    for (std::size_t i = 0; i < prev.eta.size(); ++i) {
        const double eta = prev.eta[i];
        const double u = prev.u[i];
        const double v = prev.v[i];
        const double et = tend.eta_t[i];
        const double ut = tend.u_t[i];
        const double vt = tend.v_t[i];
        r.mass[i] = alpha * et;
        r.momentum_x[i] = alpha * et * u + (1.0 + alpha * eta) * ut + beta * g * lap_ut[i];
        r.momentum_y[i] = alpha * et * v + (1.0 + alpha * eta) * vt + beta * g * lap_vt[i];
        r.energy[i] = u * ut + v * vt + eta * et +
                      beta * g * (ut * k.lap_u[i] + u * lap_ut[i] + vt * k.lap_v[i] + v * lap_vt[i]) +
                      beta / 3.0 * k.div[i] * r.div_t[i] + 0.5 * alpha * et * (u * u + v * v) +
                      alpha * eta * (u * ut + v * vt);
    }
    return r;
}

void check_pair(const State& prev, const State& cur, double dt_s) {
    prev.check_consistent();
    cur.check_consistent();
    require_same_grid(prev.grid(), cur.grid(), "balance residual");
    if (!(dt_s > 0.0) || !std::isfinite(dt_s)) {
        throw UsageError("sample separation dt_s must be positive (got " + std::to_string(dt_s) + ")");
    }
}

}  // namespace

BalanceFields balance_residuals(const State& prev, const State& cur, double dt_s, const ModelParams& p,
                                TimeDerivative mode) {
    check_pair(prev, cur, dt_s);
    const double alpha = p.alpha;
    const double beta = p.beta;
    const double g = p.level_coefficient();
    const GridPtr& grid = prev.eta.grid_ptr();

    const Kinematics kp(prev);
    Rates rates = mode == TimeDerivative::ForwardDifference ? forward_difference_rates(prev, cur, dt_s, kp, p)
                                                            : semidiscrete_rates(prev, kp, p);

    const std::size_t n = prev.eta.size();
    ScalarField qmx(grid), qmy(grid);
    ScalarField fxx(grid), fxy(grid), fyy(grid);
    ScalarField qex(grid), qey(grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double eta = prev.eta[i];
        const double u = prev.u[i];
        const double v = prev.v[i];
        const double lu = kp.lap_u[i];
        const double lv = kp.lap_v[i];
        const double s = rates.div_t[i];

        qmx[i] = u * (alpha + alpha * alpha * eta) + alpha * beta * g * lu;
        qmy[i] = v * (alpha + alpha * alpha * eta) + alpha * beta * g * lv;

        const double common = eta + 0.5 * alpha * eta * eta - beta / 3.0 * s;
        fxx[i] = common + alpha * u * u;
        fyy[i] = common + alpha * v * v;
        fxy[i] = alpha * u * v;

        const double q2 = u * u + v * v;
        const double scalar = 0.5 * alpha * q2 + alpha * eta * eta + eta - beta / 3.0 * s;
        qex[i] = scalar * u + beta * g * eta * lu;
        qey[i] = scalar * v + beta * g * eta * lv;
    }

    BalanceFields out{
        rates.mass + divergence(qmx, qmy),
        rates.momentum_x + divergence(fxx, fxy),
        rates.momentum_y + divergence(fxy, fyy),
        rates.energy + divergence(qex, qey),
    };
    out.mass.require_finite("mass residual");
    out.momentum_x.require_finite("x-momentum residual");
    out.momentum_y.require_finite("y-momentum residual");
    out.energy.require_finite("energy residual");
    return out;
}

ScalarField mass_residual(const State& prev, const State& cur, double dt_s, const ModelParams& p) {
    return balance_residuals(prev, cur, dt_s, p).mass;
}

ScalarField momentum_residual_x(const State& prev, const State& cur, double dt_s, const ModelParams& p) {
    return balance_residuals(prev, cur, dt_s, p).momentum_x;
}

ScalarField momentum_residual_y(const State& prev, const State& cur, double dt_s, const ModelParams& p) {
    return balance_residuals(prev, cur, dt_s, p).momentum_y;
}

ScalarField energy_residual(const State& prev, const State& cur, double dt_s, const ModelParams& p) {
    return balance_residuals(prev, cur, dt_s, p).energy;
}

BalanceSample reduce(const BalanceFields& f, double t) {
    BalanceSample s;
    s.t = t;
    s.r_mass = f.mass.max_abs();
    s.r_momx = f.momentum_x.max_abs();
    s.r_momy = f.momentum_y.max_abs();
    s.r_energy = f.energy.max_abs();
    s.l2_mass = f.mass.l2_norm();
    s.l2_momx = f.momentum_x.l2_norm();
    s.l2_momy = f.momentum_y.l2_norm();
    s.l2_energy = f.energy.l2_norm();
    return s;
}

double combine_momentum(double momx, double momy, MomentumCombine how) {
    switch (how) {
        case MomentumCombine::Max: return std::max(momx, momy);
        case MomentumCombine::Sum: return momx + momy;
        case MomentumCombine::Norm: return std::hypot(momx, momy);
    }
    return std::max(momx, momy);
}

void ResidualSeries::add(const BalanceSample& s) {
    if (!samples_.empty() && !(s.t > samples_.back().t)) {
        throw UsageError("residual samples must have strictly increasing timestamps");
    }
    samples_.push_back(s);
    summary_.t = s.t;
    summary_.r_mass = std::max(summary_.r_mass, s.r_mass);
    summary_.r_momx = std::max(summary_.r_momx, s.r_momx);
    summary_.r_momy = std::max(summary_.r_momy, s.r_momy);
    summary_.r_energy = std::max(summary_.r_energy, s.r_energy);
    summary_.l2_mass = std::max(summary_.l2_mass, s.l2_mass);
    summary_.l2_momx = std::max(summary_.l2_momx, s.l2_momx);
    summary_.l2_momy = std::max(summary_.l2_momy, s.l2_momy);
    summary_.l2_energy = std::max(summary_.l2_energy, s.l2_energy);
}

double ResidualSeries::momentum_summary(MomentumCombine how) const {
    if (how == MomentumCombine::Max) return std::max(summary_.r_momx, summary_.r_momy);
    double m = 0.0;
    for (const auto& s : samples_) m = std::max(m, combine_momentum(s.r_momx, s.r_momy, how));
    return m;
}

Observer residual_observer(ResidualSeries& series, const ModelParams& p) {
    return [&series, p](const State& prev, const State& cur, double dt_s) {
        series.add(reduce(balance_residuals(prev, cur, dt_s, p), prev.t));
    };
}

Observer mass_integral_observer(std::vector<double>& integrals, const ModelParams& p) {
    return [&integrals, p](const State& prev, const State& cur, double dt_s) {
        integrals.push_back(mass_residual(prev, cur, dt_s, p).integral());
    };
}

// ---------------------------------------------------------------------------

double default_exclusion_radius(double t) { return t > 1.0 ? 1.0 : 0.0; }

namespace {

double bilinear(const ScalarField& f, double x, double y) {
    const GridSpec& g = f.grid();
    const double fx = (x - g.x0) / g.dx();
    const double fy = (y - g.y0) / g.dy();
    const double ix = std::floor(fx);
    const double iy = std::floor(fy);
    const double tx = fx - ix;
    const double ty = fy - iy;
    auto wrap = [](long i, std::size_t n) {
        const long m = static_cast<long>(n);
        return static_cast<std::size_t>(((i % m) + m) % m);
    };
    const std::size_t i0 = wrap(static_cast<long>(ix), g.nx);
    const std::size_t i1 = wrap(static_cast<long>(ix) + 1, g.nx);
    const std::size_t j0 = wrap(static_cast<long>(iy), g.ny);
    const std::size_t j1 = wrap(static_cast<long>(iy) + 1, g.ny);
    return (1 - tx) * (1 - ty) * f(i0, j0) + tx * (1 - ty) * f(i1, j0) + (1 - tx) * ty * f(i0, j1) +
           tx * ty * f(i1, j1);
}

}  // namespace

std::optional<WavePeak> leading_wave_amplitude(const State& s, double r_min, double rel_threshold) {
    const GridSpec& g = s.grid();
    const double xc = g.x0 + 0.5 * g.lx;
    const double yc = g.y0 + 0.5 * g.ly;
    const double h = g.dx();
    const auto count = static_cast<std::size_t>(std::floor(0.5 * g.lx / h));

    std::vector<double> ray(count + 1);
    for (std::size_t m = 0; m <= count; ++m) ray[m] = bilinear(s.eta, xc + static_cast<double>(m) * h, yc);

    const auto first = static_cast<std::size_t>(std::ceil(r_min / h));
    if (first + 1 > count) return std::nullopt;

    double ceiling = -std::numeric_limits<double>::infinity();
    for (std::size_t m = first; m <= count; ++m) ceiling = std::max(ceiling, ray[m]);
    if (!(ceiling > 0.0)) return std::nullopt;
    const double threshold = rel_threshold * ceiling;

    // The ray starts at the center of a symmetric field, so index 0 is a
    // maximum whenever the next sample does not exceed it.
    auto is_peak = [&](std::size_t m) {
        if (ray[m] <= threshold) return false;
        if (m == 0) return ray[0] > ray[1];
        return ray[m] >= ray[m - 1] && ray[m] > ray[m + 1];
    };

    for (std::size_t m = count; m-- > first;) {
        if (!is_peak(m)) continue;
        if (m == 0) return WavePeak{0.0, ray[0]};
        const double left = ray[m - 1];
        const double mid = ray[m];
        const double right = ray[m + 1];
        const double curvature = left - 2.0 * mid + right;
        double offset = 0.0;
        double amplitude = mid;
        if (curvature < 0.0) {
            offset = 0.5 * (left - right) / curvature;
            amplitude = mid - 0.25 * (left - right) * offset;
        }
        return WavePeak{(static_cast<double>(m) + offset) * h, amplitude};
    }
    return std::nullopt;
}

std::optional<WavePeak> leading_wave_amplitude(const State& s) {
    return leading_wave_amplitude(s, default_exclusion_radius(s.t));
}

void AmplitudeTrack::add(double t, const WavePeak& peak) {
    times.push_back(t);
    radii.push_back(peak.radius);
    amplitudes.push_back(peak.amplitude);
}

double fit_decay_exponent(const AmplitudeTrack& track) {
    if (track.times.size() != track.amplitudes.size()) throw UsageError("amplitude track is ragged");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < track.times.size(); ++i) {
        const double t = track.times[i];
        if (t < track.t_lo || t > track.t_hi) continue;
        const double a = track.amplitudes[i];
        if (!(a > 0.0) || !(t > 0.0)) throw UsageError("amplitudes and times in the fit window must be positive");
        const double x = std::log(t);
        const double y = std::log(a);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 5) {
        throw UsageError("decay fit needs at least 5 samples in the window (got " + std::to_string(n) + ")");
    }
    const double nn = static_cast<double>(n);
    const double denom = nn * sxx - sx * sx;
    if (!(denom > 0.0)) throw UsageError("decay fit window contains a single distinct time");
    return (nn * sxy - sx * sy) / denom;
}

Observer amplitude_observer(AmplitudeTrack& track) {
    return [&track](const State&, const State& cur, double) {
        if (auto peak = leading_wave_amplitude(cur)) track.add(cur.t, *peak);
    };
}

// ---------------------------------------------------------------------------

VelocityPair reconstruct_velocity_at_level(const State& s, const ModelParams& p, double theta_from2,
                                           double theta_to2) {
    auto in_range = [](double t) { return t >= 0.0 && t <= 1.0; };
    if (!in_range(theta_from2) || !in_range(theta_to2)) {
        throw ParameterError("velocity levels must lie in [0, 1]");
    }
    s.check_consistent();
    s.u.require_finite("state U");
    s.v.require_finite("state V");

    const double beta = p.beta;
    // Lap -> -|k|^2, so with q = beta |k|^2 the two maps become polynomials in q.
    auto multiplier = [&](double k2) {
        const double q = beta * k2;
        const double down = 1.0 - 0.5 * theta_from2 * q + 5.0 / 24.0 * theta_from2 * theta_from2 * q * q;
        const double up = 1.0 + 0.5 * theta_to2 * q + 1.0 / 24.0 * theta_to2 * theta_to2 * q * q;
        return down * up;
    };
    auto map = [&](const ScalarField& f) {
        Spectrum sp = forward(f);
        for_each_mode(sp, [&](std::complex<double>& c, const Mode& m) { c *= multiplier(m.k2); });
        return inverse(std::move(sp));
    };
    return VelocityPair{map(s.u), map(s.v)};
}

ScalarField dynamic_pressure(const State& s, const ModelParams& p, double z, const State& prev, double dt_s) {
    check_pair(prev, s, dt_s);
    const double top = 1.0 + p.alpha * s.eta.max();
    if (!(z >= 0.0 && z <= top)) {
        throw ParameterError("z = " + std::to_string(z) + " lies outside the fluid column [0, " +
                             std::to_string(top) + "]");
    }
    const double inv = 1.0 / dt_s;
    const ScalarField div_t = divergence((s.u - prev.u) * inv, (s.v - prev.v) * inv);
    ScalarField out = s.eta;
    out.axpy(0.5 * p.beta * (z * z - 1.0), div_t);
    return out;
}

// ---------------------------------------------------------------------------

QuantityKind parse_quantity_kind(std::string_view name) {
    if (name == "length_x" || name == "x") return QuantityKind::LengthX;
    if (name == "length_y" || name == "y") return QuantityKind::LengthY;
    if (name == "elevation" || name == "eta") return QuantityKind::Elevation;
    if (name == "velocity") return QuantityKind::Velocity;
    if (name == "time" || name == "t") return QuantityKind::Time;
    throw UsageError("unknown quantity kind '" + std::string(name) + "'");
}

double dimensionalize(double value, QuantityKind kind, const PhysicalScales& sc) {
    if (!(sc.h0 > 0.0 && sc.g > 0.0 && sc.amplitude > 0.0 && sc.wavelength > 0.0)) {
        throw ParameterError("h0, g, A and l must all be positive");
    }
    switch (kind) {
        case QuantityKind::LengthX:
        case QuantityKind::LengthY: return value * sc.wavelength;
        case QuantityKind::Elevation: return value * sc.amplitude;
        case QuantityKind::Velocity: return value * sc.amplitude * std::sqrt(sc.g / sc.h0);
        case QuantityKind::Time: return value * sc.wavelength / std::sqrt(sc.g * sc.h0);
    }
    throw UsageError("unknown quantity kind");
}

}  // namespace bsq

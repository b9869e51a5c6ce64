#include "bsq/integrator.hpp"

#include "bsq/error.hpp"
#include "bsq/io.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

namespace bsq {

void SimConfig::validate() const {
    (void)make_grid();
    (void)model();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
    const double steps = std::round(t_end / dt);
    if (std::abs(steps * dt - t_end) > 1e-9 * t_end) {
        throw ConfigError("t_end must be an exact multiple of dt");
    }
    if (output_stride < 1) throw ConfigError("output_stride must be >= 1");
    if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
    if (const auto* g = std::get_if<GaussianIC>(&initial_condition)) {
        if (!(g->width > 0.0)) throw ConfigError("gaussian width must be positive");
    } else if (const auto* w = std::get_if<PlaneWaveIC>(&initial_condition)) {
        if (w->kx == 0.0 && w->ky == 0.0) throw ConfigError("plane wave needs a non-zero wavenumber");
    } else if (std::get<FileIC>(initial_condition).path.empty()) {
        throw ConfigError("initial condition file path is empty");
    }
}

std::size_t SimConfig::step_count() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

GridPtr SimConfig::make_grid() const { return bsq::make_grid(nx, ny, lx, ly, x0, y0); }

ModelParams SimConfig::model() const { return ModelParams::make(alpha, beta, theta2, lambda, mu, linearized, dealias); }

State gaussian_state(const GridPtr& grid, const GaussianIC& g) {
    const double xc = grid->x0 + 0.5 * grid->lx;
    const double yc = grid->y0 + 0.5 * grid->ly;
    State s = State::zero(grid);
    s.eta = ScalarField::from_function(grid, [&](double x, double y) {
        const double r2 = (x - xc) * (x - xc) + (y - yc) * (y - yc);
        return g.amplitude * std::exp(-r2 / g.width);
    });
    return s;
}

namespace {

void require_resolvable(double k, double length, std::size_t n, const char* name) {
    const double index = k * length / (2.0 * std::numbers::pi);
    if (std::abs(index - std::round(index)) > 1e-9 * std::max(1.0, std::abs(index)) ||
        std::abs(std::round(index)) >= static_cast<double>(n / 2)) {
        throw ConfigError(std::string("plane wave ") + name + " is not a resolvable wavenumber of the grid");
    }
}

}  // namespace

State plane_wave_state(const GridPtr& grid, const ModelParams& p, const PlaneWaveIC& w) {
    require_resolvable(w.kx, grid->lx, grid->nx, "kx");
    require_resolvable(w.ky, grid->ly, grid->ny, "ky");
    const double k2 = w.kx * w.kx + w.ky * w.ky;
    const double k = std::sqrt(k2);
    if (k == 0.0) throw ConfigError("plane wave needs a non-zero wavenumber");
    const DispersionRoot root = dispersion_omega(w.kx, w.ky, p);
    if (root.unstable) throw ConfigError("plane wave wavenumber is linearly unstable for these parameters");

    // From the linearized mass equation: the velocity amplitude along k.
    const double speed = w.amplitude * root.omega * (1.0 + p.beta * p.d() * k2) / (k * (1.0 - p.beta * p.c() * k2));
    State s = State::zero(grid);
    s.eta = ScalarField::from_function(grid, [&](double x, double y) { return w.amplitude * std::cos(w.kx * x + w.ky * y); });
    s.u = ScalarField::from_function(grid, [&](double x, double y) { return speed * w.kx / k * std::cos(w.kx * x + w.ky * y); });
    s.v = ScalarField::from_function(grid, [&](double x, double y) { return speed * w.ky / k * std::cos(w.kx * x + w.ky * y); });
    return s;
}

State make_initial_state(const SimConfig& cfg) {
    const GridPtr grid = cfg.make_grid();
    if (const auto* g = std::get_if<GaussianIC>(&cfg.initial_condition)) return gaussian_state(grid, *g);
    if (const auto* w = std::get_if<PlaneWaveIC>(&cfg.initial_condition)) {
        return plane_wave_state(grid, cfg.model(), *w);
    }
    const Snapshot snap = read_snapshot(std::get<FileIC>(cfg.initial_condition).path);
    if (!snap.state.grid().same_geometry(*grid)) {
        throw ConfigError("initial condition file grid does not match the configured grid");
    }
    // Rebind to the configured grid so all fields share one GridSpec.
    State s = State::zero(grid, snap.state.t);
    std::copy(snap.state.eta.data().begin(), snap.state.eta.data().end(), s.eta.data().begin());
    std::copy(snap.state.u.data().begin(), snap.state.u.data().end(), s.u.data().begin());
    std::copy(snap.state.v.data().begin(), snap.state.v.data().end(), s.v.data().begin());
    return s;
}

namespace {

/// base + h * k, written field by field.
State advance(const State& base, double h, const Tendency& k) {
    State out = base;
    out.eta.axpy(h, k.eta_t);
    out.u.axpy(h, k.u_t);
    out.v.axpy(h, k.v_t);
    return out;
}

Tendency evaluate(const State& s, const ModelParams& p, std::size_t step_index) {
    try {
        return rhs(s, p);
    } catch (const BlowUpError&) {
        throw;
    } catch (const NumericError& e) {
        throw BlowUpError(e.what(), step_index);
    }
}

}  // namespace

State rk4_step(const State& s, double dt, const ModelParams& p, std::size_t step_index) {
    if (dt == 0.0 || !std::isfinite(dt)) throw ParameterError("rk4_step needs a finite non-zero dt");

    const Tendency k1 = evaluate(s, p, step_index);
    const Tendency k2 = evaluate(advance(s, 0.5 * dt, k1), p, step_index);
    const Tendency k3 = evaluate(advance(s, 0.5 * dt, k2), p, step_index);
    const Tendency k4 = evaluate(advance(s, dt, k3), p, step_index);

    State out = s;
    const double w1 = dt / 6.0;
    const double w2 = dt / 3.0;
    auto combine = [&](ScalarField& f, const ScalarField& a, const ScalarField& b, const ScalarField& c,
                       const ScalarField& d) {
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += w1 * (a[i] + d[i]) + w2 * (b[i] + c[i]);
    };
    combine(out.eta, k1.eta_t, k2.eta_t, k3.eta_t, k4.eta_t);
    combine(out.u, k1.u_t, k2.u_t, k3.u_t, k4.u_t);
    combine(out.v, k1.v_t, k2.v_t, k3.v_t, k4.v_t);
    out.t = s.t + dt;

    if (!out.all_finite()) throw BlowUpError("non-finite state after RK4 step", step_index);
    return out;
}

RunSummary run_simulation(const SimConfig& cfg, std::span<const Observer> observers, const RunOptions& options) {
    cfg.validate();
    const ModelParams params = cfg.model();
    const auto start = std::chrono::steady_clock::now();

    State state = options.resume_state ? *options.resume_state : make_initial_state(cfg);
    std::size_t step = options.resume_state ? options.resume_step : 0;
    const std::size_t total = cfg.step_count();
    const std::size_t last = options.stop_step ? std::min(*options.stop_step, total) : total;
    const double dt_s = cfg.dt * static_cast<double>(cfg.output_stride);

    RunSummary summary;
    State sample = state;
    try {
        while (step < last) {
            state = rk4_step(state, cfg.dt, params, step + 1);
            ++step;
            if (step % cfg.output_stride == 0) {
                if (!state.positive_depth(params.alpha)) {
                    throw BlowUpError("total depth 1 + alpha*eta became non-positive", step);
                }
                for (const auto& obs : observers) obs(sample, state, dt_s);
                sample = state;
            }
            if (options.snapshot_sink && step % cfg.snapshot_stride == 0) options.snapshot_sink(state, step);
        }
    } catch (const BlowUpError& e) {
        summary.blew_up = true;
        summary.blow_up_step = e.step();
        summary.message = e.what();
    }

    summary.steps = step;
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    summary.max_abs_eta = state.eta.max_abs();
    summary.final_state = std::move(state);
    return summary;
}

}  // namespace bsq

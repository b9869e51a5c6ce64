#pragma once

#include "bsq/grid.hpp"
#include "bsq/model.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace bsq {

/// eta = amplitude * exp(-r^2 / width), r measured from the domain center.
struct GaussianIC {
    double amplitude = 1.0;
    double width = 5.0;

    bool operator==(const GaussianIC&) const = default;
};

/// Linear travelling wave eta = amplitude * cos(kx x + ky y) with the
/// matching velocity field, so a linearized run propagates it unchanged.
struct PlaneWaveIC {
    double kx = 1.0;
    double ky = 0.0;
    double amplitude = 1.0;

    bool operator==(const PlaneWaveIC&) const = default;
};

/// State read from a snapshot file.
struct FileIC {
    std::string path;

    bool operator==(const FileIC&) const = default;
};

using InitialCondition = std::variant<GaussianIC, PlaneWaveIC, FileIC>;

struct SimConfig {
    std::size_t nx = 256;
    std::size_t ny = 256;
    double lx = 40.0;
    double ly = 40.0;
    double x0 = -20.0;
    double y0 = -20.0;

    double alpha = 0.3;
    double beta = 0.3;
    double theta2 = 9.0 / 11.0;
    double lambda = 0.0;
    double mu = 0.0;
    bool linearized = false;
    bool dealias = true;

    double dt = 1e-3;
    double t_end = 10.0;
    std::size_t output_stride = 1;
    std::size_t snapshot_stride = 1000;
    InitialCondition initial_condition = GaussianIC{};

    /// Throws ConfigError (or ParameterError for model inputs) on violation.
    void validate() const;
    /// round(t_end / dt); t_end must be a multiple of dt.
    std::size_t step_count() const;
    GridPtr make_grid() const;
    ModelParams model() const;

    bool operator==(const SimConfig&) const = default;
};

/// Samples the configured initial condition at t = 0.
State make_initial_state(const SimConfig& cfg);
State plane_wave_state(const GridPtr& grid, const ModelParams& p, const PlaneWaveIC& wave);
State gaussian_state(const GridPtr& grid, const GaussianIC& g);

/// One classical four-stage Runge-Kutta step. dt may be negative (used for
/// time-reversal checks) but must be finite and non-zero. Non-finite
/// results raise BlowUpError tagged with `step_index`.
State rk4_step(const State& s, double dt, const ModelParams& p, std::size_t step_index = 0);

/// Receives the previous diagnostic sample, the current one and their time
/// separation dt * output_stride.
using Observer = std::function<void(const State& prev, const State& cur, double dt_s)>;
using SnapshotSink = std::function<void(const State& s, std::size_t step)>;

struct RunOptions {
    SnapshotSink snapshot_sink;
    /// Continue from a checkpointed state instead of the initial condition.
    std::optional<State> resume_state;
    std::size_t resume_step = 0;
    /// Stop early after this many total steps (used to produce checkpoints).
    std::optional<std::size_t> stop_step;
};

struct RunSummary {
    std::size_t steps = 0;
    double wall_seconds = 0.0;
    double max_abs_eta = 0.0;  // final state
    bool blew_up = false;
    std::size_t blow_up_step = 0;
    std::string message;
    State final_state;
};

/// Steps from t = 0 (or the resume point) to t_end, calling every observer
/// each output_stride steps. A blow-up stops the run and is reported in the
/// summary rather than thrown.
RunSummary run_simulation(const SimConfig& cfg, std::span<const Observer> observers = {},
                          const RunOptions& options = {});

}  // namespace bsq

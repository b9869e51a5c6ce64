#include "cli.hpp"

#include "bsq/diagnostics.hpp"
#include "bsq/error.hpp"
#include "bsq/integrator.hpp"
#include "bsq/io.hpp"
#include "bsq/study.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace bsq::cli {

namespace fs = std::filesystem;

namespace {

unsigned thread_count() {
    if (const char* env = std::getenv("BSQ_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 1;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("malformed number '" + item + "' in list");
        }
    }
    if (values.empty()) throw UsageError("empty list");
    return values;
}

std::pair<double, double> parse_window(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("window must look like LO:HI");
    try {
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw UsageError("window must look like LO:HI");
    }
}

std::string snapshot_name(std::size_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%08zu.bsq", step);
    return buf;
}

struct SimulateArgs {
    std::string config;
    std::string out_dir = "bsq_out";
    std::string checkpoint;
    std::string resume;
    bool snapshots = true;
};

int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    const SimConfig cfg = load_config(a.config);
    const ModelParams p = cfg.model();
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);

    RunOptions options;
    if (!a.resume.empty()) {
        Checkpoint c = read_checkpoint(a.resume, cfg);
        options.resume_state = std::move(c.snapshot.state);
        options.resume_step = c.step;
    } else {
        options.resume_state = make_initial_state(cfg);
    }
    if (a.snapshots) {
        options.snapshot_sink = [&](const State& s, std::size_t step) { write_snapshot(dir / snapshot_name(step), s, p); };
        if (options.resume_step == 0) write_snapshot(dir / snapshot_name(0), *options.resume_state, p);
    }

    ResidualSeries series;
    AmplitudeTrack track;
    if (auto peak = leading_wave_amplitude(*options.resume_state)) track.add(options.resume_state->t, *peak);
    const std::vector<Observer> observers{residual_observer(series, p), amplitude_observer(track)};

    const RunSummary summary = run_simulation(cfg, observers, options);

    if (!series.empty()) {
        write_residual_csv(series, dir / "residuals.csv");
        write_residual_csv(series, dir / "residuals_l2.csv", ResidualNorm::L2);
    }
    write_amplitude_csv(track, dir / "amplitude.csv");
    if (!a.checkpoint.empty()) write_checkpoint(a.checkpoint, summary.final_state, cfg, summary.steps);

    out << "steps " << summary.steps << '\n';
    out << "t " << format_double(summary.final_state.t) << '\n';
    out << "max_abs_eta " << format_double(summary.max_abs_eta) << '\n';
    out << "wall_seconds " << summary.wall_seconds << '\n';
    if (!series.empty()) {
        const auto& m = series.summary();
        out << "max_r_mass " << format_double(m.r_mass) << '\n';
        out << "max_r_momx " << format_double(m.r_momx) << '\n';
        out << "max_r_momy " << format_double(m.r_momy) << '\n';
        out << "max_r_energy " << format_double(m.r_energy) << '\n';
    }
    if (summary.blew_up) {
        err << "blow-up: " << summary.message << '\n';
        return kNumeric;
    }
    return kOk;
}

int residuals(const std::string& path_a, const std::string& path_b, std::ostream& out) {
    const Snapshot a = read_snapshot(path_a);
    const Snapshot b = read_snapshot(path_b);
    if (!a.state.grid().same_geometry(b.state.grid())) throw UsageError("snapshots live on different grids");
    const double dt_s = b.state.t - a.state.t;
    if (dt_s < 0.0) throw UsageError("second snapshot must not precede the first");
    // Identical times leave only the flux divergences; any positive
    // separation then gives the same result.
    const double sep = dt_s > 0.0 ? dt_s : 1.0;

    // Rebind b to a's grid object.
    State cur = State::zero(a.state.eta.grid_ptr(), b.state.t);
    std::copy(b.state.eta.data().begin(), b.state.eta.data().end(), cur.eta.data().begin());
    std::copy(b.state.u.data().begin(), b.state.u.data().end(), cur.u.data().begin());
    std::copy(b.state.v.data().begin(), b.state.v.data().end(), cur.v.data().begin());

    const BalanceSample s = reduce(balance_residuals(a.state, cur, sep, a.params()), a.state.t);
    out << "t,r_mass,r_momx,r_momy,r_energy\n";
    out << format_double(s.t) << ',' << format_double(s.r_mass) << ',' << format_double(s.r_momx) << ','
        << format_double(s.r_momy) << ',' << format_double(s.r_energy) << '\n';
    return kOk;
}

int sweep(const std::string& config, const std::string& alphas, const std::string& out_path, std::ostream& out,
          std::ostream& err) {
    const SimConfig cfg = load_config(config);
    const std::vector<double> values = parse_list(alphas);
    for (double v : values) {
        SimConfig probe = cfg;
        probe.alpha = probe.beta = v;
        probe.validate();
    }
    const auto rows = run_sweep(cfg, values, thread_count());

    std::string csv = "alpha,mass,momentum,energy,momx,momy,decay_exponent\n";
    bool blew_up = false;
    for (const auto& r : rows) {
        const auto& m = r.residuals.summary();
        csv += format_double(r.alpha) + ',' + format_double(m.r_mass) + ',' +
               format_double(r.residuals.momentum_summary()) + ',' + format_double(m.r_energy) + ',' +
               format_double(m.r_momx) + ',' + format_double(m.r_momy) + ',' + format_double(r.decay_exponent) + '\n';
        err << "alpha " << r.alpha << ": " << r.steps << " steps in " << r.wall_seconds << " s\n";
        if (r.blew_up) {
            err << "alpha " << r.alpha << " blew up: " << r.message << '\n';
            blew_up = true;
        }
    }
    if (rows.size() >= 2 && !blew_up) {
        const SweepSlopes s = sweep_slopes(rows);
        csv += "#slopes," + format_double(s.mass) + ',' + format_double(s.momentum) + ',' + format_double(s.energy) +
               '\n';
    }
    if (out_path.empty() || out_path == "-") {
        out << csv;
    } else {
        write_file_atomic(out_path, csv);
        out << "wrote " << out_path << '\n';
    }
    return blew_up ? kNumeric : kOk;
}

int dispersion(const std::string& config, double kmax, std::size_t n, std::ostream& out) {
    const SimConfig cfg = load_config(config);
    const ModelParams p = cfg.model();
    if (kmax < 0.0) throw UsageError("--kmax must be non-negative");
    if (n < 1) throw UsageError("--n must be >= 1");
    const std::size_t rows = kmax == 0.0 ? 1 : n;
    out << "k,omega,unstable\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const double k = rows == 1 ? kmax : kmax * static_cast<double>(i) / static_cast<double>(rows - 1);
        const DispersionRoot r = dispersion_omega(k, 0.0, p);
        out << format_double(k) << ',' << format_double(r.omega) << ',' << (r.unstable ? 1 : 0) << '\n';
    }
    return kOk;
}

int profile(const std::string& snap_path, double z, const std::string& prev_path, const std::string& out_path,
            std::ostream& out) {
    const Snapshot snap = read_snapshot(snap_path);
    const ModelParams p = snap.params();
    const State& s = snap.state;

    State prev = s;
    double dt_s = 1.0;
    if (!prev_path.empty()) {
        const Snapshot before = read_snapshot(prev_path);
        if (!before.state.grid().same_geometry(s.grid())) throw UsageError("snapshots live on different grids");
        dt_s = s.t - before.state.t;
        if (!(dt_s > 0.0)) throw UsageError("--prev snapshot must precede SNAP");
        std::copy(before.state.eta.data().begin(), before.state.eta.data().end(), prev.eta.data().begin());
        std::copy(before.state.u.data().begin(), before.state.u.data().end(), prev.u.data().begin());
        std::copy(before.state.v.data().begin(), before.state.v.data().end(), prev.v.data().begin());
        prev.t = before.state.t;
    }

    const ScalarField pressure = dynamic_pressure(s, p, z, prev, dt_s);
    // Velocity levels are only defined inside the undisturbed column.
    const double level = std::min(z, 1.0);
    const VelocityPair vel = reconstruct_velocity_at_level(s, p, p.theta2, level * level);

    const GridSpec& g = s.grid();
    std::string csv = "x,y,pressure,u,v\n";
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            csv += format_double(g.x(i)) + ',' + format_double(g.y(j)) + ',' + format_double(pressure(i, j)) + ',' +
                   format_double(vel.u(i, j)) + ',' + format_double(vel.v(i, j)) + '\n';
        }
    }
    if (out_path.empty() || out_path == "-") {
        out << csv;
    } else {
        write_file_atomic(out_path, csv);
        out << "wrote " << out_path << '\n';
    }
    return kOk;
}

int decay_fit(const std::string& path, const std::string& window, std::ostream& out) {
    AmplitudeTrack track = read_amplitude_csv(path);
    std::tie(track.t_lo, track.t_hi) = parse_window(window);
    out << format_double(fit_decay_exponent(track)) << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudo-spectral solver and balance-law diagnostics for a-b-c-d Boussinesq systems", "bsq"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Run a configuration and write snapshots and residual CSVs");
    sim->add_option("config", sim_args.config, "Run configuration file")->required();
    sim->add_option("--out", sim_args.out_dir, "Output directory")->capture_default_str();
    sim->add_option("--checkpoint", sim_args.checkpoint, "Write a restart checkpoint at the end of the run");
    sim->add_option("--resume", sim_args.resume, "Resume from a checkpoint");
    sim->add_flag("!--no-snapshots", sim_args.snapshots, "Skip snapshot files");

    std::string snap_a, snap_b;
    auto* res = app.add_subcommand("residuals", "Evaluate balance-law residuals for a stored snapshot pair");
    res->add_option("snap_a", snap_a)->required();
    res->add_option("snap_b", snap_b)->required();

    std::string sweep_cfg, alphas = "0.05,0.10,0.15,0.20,0.25,0.30", sweep_out;
    auto* sw = app.add_subcommand("sweep", "Run alpha = beta over a list and tabulate maximum residuals");
    sw->add_option("config", sweep_cfg)->required();
    sw->add_option("--alphas", alphas, "Comma-separated alpha = beta values")->capture_default_str();
    sw->add_option("--out", sweep_out, "Output CSV (default: standard output)");

    std::string disp_cfg;
    double kmax = 5.0;
    std::size_t npts = 101;
    auto* disp = app.add_subcommand("dispersion", "Tabulate the linear dispersion relation omega(|k|)");
    disp->add_option("config", disp_cfg)->required();
    disp->add_option("--kmax", kmax)->capture_default_str();
    disp->add_option("--n", npts)->capture_default_str();

    std::string prof_snap, prof_prev, prof_out;
    double z = 1.0;
    auto* prof = app.add_subcommand("profile", "Dynamic pressure and velocities at height z");
    prof->add_option("snapshot", prof_snap)->required();
    prof->add_option("--z", z, "Height above the bed (non-dimensional)")->required();
    prof->add_option("--prev", prof_prev, "Earlier snapshot for the time derivatives (default: steady)");
    prof->add_option("--out", prof_out, "Output CSV (default: standard output)");

    std::string amp_csv, window = "4:10";
    auto* fit = app.add_subcommand("decay-fit", "Fit amplitude ~ t^p to a leading-wave amplitude CSV");
    fit->add_option("amplitude_csv", amp_csv)->required();
    fit->add_option("--window", window, "Fit window LO:HI")->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) return simulate(sim_args, out, err);
        if (*res) return residuals(snap_a, snap_b, out);
        if (*sw) return sweep(sweep_cfg, alphas, sweep_out, out, err);
        if (*disp) return dispersion(disp_cfg, kmax, npts, out);
        if (*prof) return profile(prof_snap, z, prof_prev, prof_out, out);
        if (*fit) return decay_fit(amp_csv, window, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const NumericError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}

}  // namespace bsq::cli

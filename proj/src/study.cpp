#include "bsq/study.hpp"

#include "bsq/error.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace bsq {

StudyResult run_balance_study(const SimConfig& cfg) {
    const ModelParams p = cfg.model();
    StudyResult out;
    out.alpha = cfg.alpha;
    out.beta = cfg.beta;

    const State initial = make_initial_state(cfg);
    const double mass0 = initial.eta.integral();
    if (auto peak = leading_wave_amplitude(initial)) out.amplitude.add(initial.t, *peak);

    const Observer observer = [&](const State& prev, const State& cur, double dt_s) {
        const BalanceFields fields = balance_residuals(prev, cur, dt_s, p);
        out.residuals.add(reduce(fields, prev.t));
        out.max_mass_residual_integral = std::max(out.max_mass_residual_integral, std::abs(fields.mass.integral()));
        const double drift = std::abs(cur.eta.integral() - mass0) / std::abs(mass0);
        out.max_mass_drift = std::max(out.max_mass_drift, drift);
        if (auto peak = leading_wave_amplitude(cur)) out.amplitude.add(cur.t, *peak);
    };

    RunOptions options;
    options.resume_state = initial;
    const RunSummary summary = run_simulation(cfg, std::span(&observer, 1), options);
    out.steps = summary.steps;
    out.wall_seconds = summary.wall_seconds;
    out.blew_up = summary.blew_up;
    out.message = summary.message;
    try {
        out.decay_exponent = fit_decay_exponent(out.amplitude);
    } catch (const UsageError&) {
        out.decay_exponent = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

std::vector<StudyResult> run_sweep(const SimConfig& base, std::span<const double> values, unsigned threads) {
    std::vector<StudyResult> results(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    auto work = [&](std::size_t i) {
        try {
            SimConfig cfg = base;
            cfg.alpha = values[i];
            cfg.beta = values[i];
            results[i] = run_balance_study(cfg);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < values.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < values.size(); i = next++) work(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw UsageError("log-log fit needs at least two paired points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw UsageError("log-log fit needs positive values");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepSlopes sweep_slopes(std::span<const StudyResult> rows, MomentumCombine how) {
    std::vector<double> a, mass, mom, energy;
    for (const auto& r : rows) {
        a.push_back(r.alpha);
        mass.push_back(r.residuals.summary().r_mass);
        mom.push_back(r.residuals.momentum_summary(how));
        energy.push_back(r.residuals.summary().r_energy);
    }
    return SweepSlopes{loglog_slope(a, mass), loglog_slope(a, mom), loglog_slope(a, energy)};
}

}  // namespace bsq

#include "bsq/diagnostics.hpp"
#include "bsq/error.hpp"
#include "bsq/integrator.hpp"
#include "bsq/io.hpp"
#include "bsq/model.hpp"
#include "bsq/spectral.hpp"
#include "bsq/study.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cstring>

namespace py = pybind11;
using namespace bsq;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const ScalarField& f) {
    const GridSpec& g = f.grid();
    Array out({g.ny, g.nx});
    std::memcpy(out.mutable_data(), f.data().data(), f.size() * sizeof(double));
    return out;
}

Array to_numpy(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

ScalarField from_numpy(const GridPtr& g, const Array& a, const char* what) {
    if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != g->ny ||
        static_cast<std::size_t>(a.shape(1)) != g->nx) {
        throw UsageError(std::string(what) + ": expected an array of shape (" + std::to_string(g->ny) + ", " +
                         std::to_string(g->nx) + ")");
    }
    RealVector data(a.data(), a.data() + a.size());
    return ScalarField(g, std::move(data));
}

State make_state(const GridPtr& g, const Array& eta, const Array& u, const Array& v, double t) {
    State s{from_numpy(g, eta, "eta"), from_numpy(g, u, "u"), from_numpy(g, v, "v"), t};
    return s;
}

py::dict residual_dict(const BalanceFields& f) {
    py::dict d;
    d["mass"] = to_numpy(f.mass);
    d["momentum_x"] = to_numpy(f.momentum_x);
    d["momentum_y"] = to_numpy(f.momentum_y);
    d["energy"] = to_numpy(f.energy);
    return d;
}

py::dict study_dict(const StudyResult& r) {
    py::dict d;
    std::vector<double> t, mass, momx, momy, energy;
    for (const auto& s : r.residuals.samples()) {
        t.push_back(s.t);
        mass.push_back(s.r_mass);
        momx.push_back(s.r_momx);
        momy.push_back(s.r_momy);
        energy.push_back(s.r_energy);
    }
    py::dict res;
    res["t"] = to_numpy(t);
    res["mass"] = to_numpy(mass);
    res["momentum_x"] = to_numpy(momx);
    res["momentum_y"] = to_numpy(momy);
    res["energy"] = to_numpy(energy);
    d["residuals"] = res;

    py::dict amp;
    amp["t"] = to_numpy(r.amplitude.times);
    amp["radius"] = to_numpy(r.amplitude.radii);
    amp["amplitude"] = to_numpy(r.amplitude.amplitudes);
    d["amplitude"] = amp;

    const auto& s = r.residuals.summary();
    d["alpha"] = r.alpha;
    d["beta"] = r.beta;
    d["max_mass"] = s.r_mass;
    d["max_momentum"] = r.residuals.empty() ? 0.0 : r.residuals.momentum_summary();
    d["max_energy"] = s.r_energy;
    d["max_mass_residual_integral"] = r.max_mass_residual_integral;
    d["max_mass_drift"] = r.max_mass_drift;
    d["decay_exponent"] = r.decay_exponent;
    d["steps"] = r.steps;
    d["wall_seconds"] = r.wall_seconds;
    d["blew_up"] = r.blew_up;
    d["message"] = r.message;
    return d;
}

}  // namespace

PYBIND11_MODULE(_bsq, m) {
    m.doc() = "Pseudo-spectral a-b-c-d Boussinesq solver";

    auto base = py::register_exception<Error>(m, "BsqError", PyExc_RuntimeError);
    // Registration order matters: more derived types are tried first.
    py::register_exception<UsageError>(m, "UsageError", base);
    py::register_exception<IoError>(m, "IoError", base);
    py::register_exception<NumericError>(m, "NumericError", base);
    py::register_exception<ParameterError>(m, "ParameterError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);

    py::class_<GridSpec, std::shared_ptr<GridSpec>>(m, "Grid")
        .def(py::init([](std::size_t nx, std::size_t ny, double lx, double ly, double x0, double y0) {
                 return std::const_pointer_cast<GridSpec>(make_grid(nx, ny, lx, ly, x0, y0));
             }),
             py::arg("nx"), py::arg("ny"), py::arg("lx"), py::arg("ly"), py::arg("x0") = 0.0, py::arg("y0") = 0.0)
        .def_readonly("nx", &GridSpec::nx)
        .def_readonly("ny", &GridSpec::ny)
        .def_readonly("lx", &GridSpec::lx)
        .def_readonly("ly", &GridSpec::ly)
        .def_readonly("x0", &GridSpec::x0)
        .def_readonly("y0", &GridSpec::y0)
        .def_property_readonly("dx", &GridSpec::dx)
        .def_property_readonly("dy", &GridSpec::dy)
        .def_property_readonly("kx", [](const GridSpec& g) { return to_numpy(g.kx); })
        .def_property_readonly("ky", [](const GridSpec& g) { return to_numpy(g.ky); })
        .def_property_readonly("x",
                               [](const GridSpec& g) {
                                   std::vector<double> v(g.nx);
                                   for (std::size_t i = 0; i < g.nx; ++i) v[i] = g.x(i);
                                   return to_numpy(v);
                               })
        .def_property_readonly("y",
                               [](const GridSpec& g) {
                                   std::vector<double> v(g.ny);
                                   for (std::size_t j = 0; j < g.ny; ++j) v[j] = g.y(j);
                                   return to_numpy(v);
                               })
        .def("__repr__", [](const GridSpec& g) {
            return "Grid(nx=" + std::to_string(g.nx) + ", ny=" + std::to_string(g.ny) + ", lx=" + format_double(g.lx) +
                   ", ly=" + format_double(g.ly) + ")";
        });

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init(&ModelParams::make), py::arg("alpha"), py::arg("beta"), py::arg("theta2") = 9.0 / 11.0,
             py::arg("lambda_") = 0.0, py::arg("mu") = 0.0, py::arg("linearized") = false, py::arg("dealias") = true)
        .def_readonly("alpha", &ModelParams::alpha)
        .def_readonly("beta", &ModelParams::beta)
        .def_readonly("theta2", &ModelParams::theta2)
        .def_readonly("lambda_", &ModelParams::lambda)
        .def_readonly("mu", &ModelParams::mu)
        .def_readonly("linearized", &ModelParams::linearized)
        .def_readonly("dealias", &ModelParams::dealias)
        .def_property_readonly("a", &ModelParams::a)
        .def_property_readonly("b", &ModelParams::b)
        .def_property_readonly("c", &ModelParams::c)
        .def_property_readonly("d", &ModelParams::d);

    py::class_<State>(m, "State")
        .def(py::init([](std::shared_ptr<GridSpec> g, const Array& eta, const Array& u, const Array& v, double t) {
                 return make_state(g, eta, u, v, t);
             }),
             py::arg("grid"), py::arg("eta"), py::arg("u"), py::arg("v"), py::arg("t") = 0.0)
        .def_static(
            "zero", [](std::shared_ptr<GridSpec> g, double t) { return State::zero(g, t); }, py::arg("grid"),
            py::arg("t") = 0.0)
        .def_readwrite("t", &State::t)
        .def_property_readonly("grid", [](const State& s) { return std::const_pointer_cast<GridSpec>(s.eta.grid_ptr()); })
        .def_property(
            "eta", [](const State& s) { return to_numpy(s.eta); },
            [](State& s, const Array& a) { s.eta = from_numpy(s.eta.grid_ptr(), a, "eta"); })
        .def_property(
            "u", [](const State& s) { return to_numpy(s.u); },
            [](State& s, const Array& a) { s.u = from_numpy(s.u.grid_ptr(), a, "u"); })
        .def_property(
            "v", [](const State& s) { return to_numpy(s.v); },
            [](State& s, const Array& a) { s.v = from_numpy(s.v.grid_ptr(), a, "v"); });

    // Spectral operators on plain arrays.
    const auto unary = [&m](const char* name, ScalarField (*op)(const ScalarField&), const char* doc) {
        m.def(
            name,
            [op](std::shared_ptr<GridSpec> g, const Array& f) { return to_numpy(op(from_numpy(g, f, "f"))); },
            py::arg("grid"), py::arg("f"), doc);
    };
    unary("ddx", &ddx, "Spectral x-derivative (Nyquist mode dropped).");
    unary("ddy", &ddy, "Spectral y-derivative (Nyquist mode dropped).");
    unary("laplacian", &laplacian, "Spectral Laplacian.");
    unary("dealias", &dealias, "Zero the top third of wavenumbers in each direction.");
    m.def(
        "helmholtz_solve",
        [](std::shared_ptr<GridSpec> g, const Array& f, double kappa) {
            return to_numpy(helmholtz_solve(from_numpy(g, f, "f"), kappa));
        },
        py::arg("grid"), py::arg("f"), py::arg("kappa"), "Solve (1 - kappa Laplacian) u = f.");

    m.def(
        "derive_abcd",
        [](double theta2, double lambda, double mu) {
            const Coefficients c = derive_abcd(theta2, lambda, mu);
            return py::make_tuple(c.a, c.b, c.c, c.d);
        },
        py::arg("theta2"), py::arg("lambda_"), py::arg("mu"));
    m.def(
        "dispersion_omega",
        [](double kx, double ky, const ModelParams& p) {
            const auto r = dispersion_omega(kx, ky, p);
            return py::make_tuple(r.omega, r.unstable);
        },
        py::arg("kx"), py::arg("ky"), py::arg("params"));

    m.def(
        "rhs",
        [](const State& s, const ModelParams& p) {
            const Tendency t = rhs(s, p);
            return py::make_tuple(to_numpy(t.eta_t), to_numpy(t.u_t), to_numpy(t.v_t));
        },
        py::arg("state"), py::arg("params"));
    m.def(
        "rk4_step", [](const State& s, double dt, const ModelParams& p) { return rk4_step(s, dt, p); },
        py::arg("state"), py::arg("dt"), py::arg("params"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("nx", &SimConfig::nx)
        .def_readwrite("ny", &SimConfig::ny)
        .def_readwrite("lx", &SimConfig::lx)
        .def_readwrite("ly", &SimConfig::ly)
        .def_readwrite("x0", &SimConfig::x0)
        .def_readwrite("y0", &SimConfig::y0)
        .def_readwrite("alpha", &SimConfig::alpha)
        .def_readwrite("beta", &SimConfig::beta)
        .def_readwrite("theta2", &SimConfig::theta2)
        .def_readwrite("lambda_", &SimConfig::lambda)
        .def_readwrite("mu", &SimConfig::mu)
        .def_readwrite("linearized", &SimConfig::linearized)
        .def_readwrite("dealias", &SimConfig::dealias)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_end", &SimConfig::t_end)
        .def_readwrite("output_stride", &SimConfig::output_stride)
        .def_readwrite("snapshot_stride", &SimConfig::snapshot_stride)
        .def("validate", &SimConfig::validate)
        .def("step_count", &SimConfig::step_count)
        .def("model", &SimConfig::model)
        .def("grid", [](const SimConfig& c) { return std::const_pointer_cast<GridSpec>(c.make_grid()); })
        .def("initial_state", &make_initial_state)
        .def("to_text", &print_config)
        .def("__eq__", [](const SimConfig& a, const SimConfig& b) { return a == b; });

    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));

    m.def(
        "simulate",
        [](const SimConfig& cfg) {
            RunSummary r;
            {
                py::gil_scoped_release release;
                r = run_simulation(cfg);
            }
            py::dict d;
            d["steps"] = r.steps;
            d["wall_seconds"] = r.wall_seconds;
            d["max_abs_eta"] = r.max_abs_eta;
            d["blew_up"] = r.blew_up;
            d["message"] = r.message;
            return py::make_tuple(std::move(r.final_state), d);
        },
        py::arg("config"), "Run to t_end; returns (final_state, summary).");
    m.def(
        "run_balance_study",
        [](const SimConfig& cfg) {
            StudyResult r;
            {
                py::gil_scoped_release release;
                r = run_balance_study(cfg);
            }
            return study_dict(r);
        },
        py::arg("config"), "Run with residual, mass and leading-wave diagnostics attached.");

    m.def(
        "balance_residuals",
        [](const State& prev, const State& cur, double dt_s, const ModelParams& p) {
            return residual_dict(balance_residuals(prev, cur, dt_s, p));
        },
        py::arg("prev"), py::arg("cur"), py::arg("dt_s"), py::arg("params"));
    m.def(
        "leading_wave_amplitude",
        [](const State& s) -> py::object {
            const auto peak = leading_wave_amplitude(s);
            if (!peak) return py::none();
            return py::make_tuple(peak->radius, peak->amplitude);
        },
        py::arg("state"), "(radius, amplitude) of the outermost crest, or None.");
    m.def(
        "fit_decay_exponent",
        [](const std::vector<double>& times, const std::vector<double>& amplitudes, double t_lo, double t_hi) {
            if (times.size() != amplitudes.size()) throw UsageError("times and amplitudes differ in length");
            AmplitudeTrack track;
            track.t_lo = t_lo;
            track.t_hi = t_hi;
            for (std::size_t i = 0; i < times.size(); ++i) track.add(times[i], WavePeak{0.0, amplitudes[i]});
            return fit_decay_exponent(track);
        },
        py::arg("times"), py::arg("amplitudes"), py::arg("t_lo") = 4.0, py::arg("t_hi") = 10.0);
    m.def(
        "reconstruct_velocity_at_level",
        [](const State& s, const ModelParams& p, double from2, double to2) {
            const VelocityPair r = reconstruct_velocity_at_level(s, p, from2, to2);
            return py::make_tuple(to_numpy(r.u), to_numpy(r.v));
        },
        py::arg("state"), py::arg("params"), py::arg("theta_from2"), py::arg("theta_to2"));
    m.def(
        "dynamic_pressure",
        [](const State& s, const ModelParams& p, double z, const State& prev, double dt_s) {
            return to_numpy(dynamic_pressure(s, p, z, prev, dt_s));
        },
        py::arg("state"), py::arg("params"), py::arg("z"), py::arg("prev"), py::arg("dt_s"));
    m.def(
        "dimensionalize",
        [](double value, std::string_view kind, double h0, double g, double amplitude, double wavelength) {
            return dimensionalize(value, parse_quantity_kind(kind), PhysicalScales{h0, g, amplitude, wavelength});
        },
        py::arg("value"), py::arg("kind"), py::arg("h0") = 1.0, py::arg("g") = 9.81, py::arg("amplitude") = 1.0,
        py::arg("wavelength") = 1.0);

    m.def(
        "read_snapshot",
        [](const std::filesystem::path& path) {
            Snapshot s = read_snapshot(path);
            const ModelParams p = s.params();
            return py::make_tuple(std::move(s.state), p);
        },
        py::arg("path"), "Returns (state, params).");
    m.def("write_snapshot", &write_snapshot, py::arg("path"), py::arg("state"), py::arg("params"));
}

#include "support.hpp"

#include "bsq/io.hpp"
#include "cli.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace bsq;
using namespace bsq::test;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "bsq");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path write_text(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path;
}

const char* kSmall =
    "nx = 16\nny = 16\nalpha = 0.3\nbeta = 0.3\ndt = 0.01\nt_end = 0.1\nsnapshot_stride = 5\n";

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"launch"}).code == cli::kUsage);
    CHECK(run_cli({"dispersion"}).code == cli::kUsage);
    const auto help = run_cli({"--help"});
    CHECK(help.code == cli::kOk);
    CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("dispersion table") {
    const auto dir = scratch_dir("cli_disp");
    const auto cfg = write_text(dir / "d.cfg", "alpha = 0.3\nbeta = 0.3\n");

    const auto zero = run_cli({"dispersion", cfg.string(), "--kmax", "0"});
    CHECK(zero.code == 0);
    CHECK(lines_of(zero.out) == std::vector<std::string>{"k,omega,unstable", "0,0,0"});

    const auto two = run_cli({"dispersion", cfg.string(), "--kmax", "1", "--n", "2"});
    const auto rows = lines_of(two.out);
    REQUIRE(rows.size() == 3);
    const double omega = std::stod(rows[2].substr(rows[2].find(',') + 1));
    CHECK(omega == doctest::Approx(0.952604).epsilon(1e-6));

    CHECK(run_cli({"dispersion", cfg.string(), "--kmax", "-1"}).code == cli::kUsage);
    CHECK(run_cli({"dispersion", (dir / "missing.cfg").string()}).code == cli::kIo);
    const auto bad = write_text(dir / "bad.cfg", "alpha = 0.3\nbeta = 0.3\nnx = 7\n");
    const auto r = run_cli({"dispersion", bad.string()});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("nx must be even") != std::string::npos);
}

TEST_CASE("simulate writes snapshots and residual series") {
    const auto dir = scratch_dir("cli_sim");
    const auto cfg = write_text(dir / "s.cfg", kSmall);
    const auto r = run_cli({"simulate", cfg.string(), "--out", (dir / "out").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("steps 10") != std::string::npos);
    for (const char* f : {"snapshot_00000000.bsq", "snapshot_00000005.bsq", "snapshot_00000010.bsq", "residuals.csv",
                          "residuals_l2.csv", "amplitude.csv"}) {
        CHECK_MESSAGE(fs::exists(dir / "out" / f), f);
    }
    const auto rows = lines_of(read_file(dir / "out" / "residuals.csv"));
    CHECK(rows.size() == 12);
    CHECK(rows.front() == "t,r_mass,r_momx,r_momy,r_energy");
    CHECK(rows.back().rfind("#max,", 0) == 0);

    SUBCASE("output is a deterministic byte stream") {
        run_cli({"simulate", cfg.string(), "--out", (dir / "again").string()});
        CHECK(read_file(dir / "again" / "residuals.csv") == read_file(dir / "out" / "residuals.csv"));
        CHECK(read_file(dir / "again" / "snapshot_00000010.bsq") == read_file(dir / "out" / "snapshot_00000010.bsq"));
    }
}

TEST_CASE("checkpoint and resume through the command line") {
    const auto dir = scratch_dir("cli_resume");
    const auto full = write_text(dir / "full.cfg", kSmall);
    const auto half = write_text(dir / "half.cfg",
                                 "nx = 16\nny = 16\nalpha = 0.3\nbeta = 0.3\ndt = 0.01\nt_end = 0.05\nsnapshot_stride = 5\n");
    REQUIRE(run_cli({"simulate", full.string(), "--out", (dir / "a").string()}).code == 0);
    REQUIRE(run_cli({"simulate", half.string(), "--out", (dir / "b").string(), "--checkpoint",
                     (dir / "half.ckpt").string()})
                .code == 0);
    REQUIRE(run_cli({"simulate", full.string(), "--out", (dir / "c").string(), "--resume",
                     (dir / "half.ckpt").string()})
                .code == 0);
    CHECK(read_file(dir / "c" / "snapshot_00000010.bsq") == read_file(dir / "a" / "snapshot_00000010.bsq"));

    const auto other = write_text(dir / "other.cfg", std::string(kSmall) + "theta2 = 0.7\n");
    CHECK(run_cli({"simulate", other.string(), "--out", (dir / "d").string(), "--resume", (dir / "half.ckpt").string()})
              .code == cli::kUsage);
}

TEST_CASE("blow-up exits with 2 after flushing outputs") {
    const auto dir = scratch_dir("cli_blow");
    const auto cfg = write_text(dir / "b.cfg", std::string(kSmall) + "ic_amplitude = -4\n");
    const auto r = run_cli({"simulate", cfg.string(), "--out", (dir / "out").string()});
    CHECK(r.code == cli::kNumeric);
    CHECK(r.err.find("blow-up") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "amplitude.csv"));
}

TEST_CASE("offline residuals of a stored pair") {
    const auto dir = scratch_dir("cli_res");
    const auto cfg = write_text(dir / "s.cfg", kSmall);
    REQUIRE(run_cli({"simulate", cfg.string(), "--out", dir.string()}).code == 0);
    const auto a = (dir / "snapshot_00000005.bsq").string();
    const auto b = (dir / "snapshot_00000010.bsq").string();

    const auto pair = run_cli({"residuals", a, b});
    CHECK(pair.code == 0);
    const Snapshot sa = read_snapshot(a);
    const Snapshot sb = read_snapshot(b);
    State cur = sa.state;
    std::copy(sb.state.eta.data().begin(), sb.state.eta.data().end(), cur.eta.data().begin());
    std::copy(sb.state.u.data().begin(), sb.state.u.data().end(), cur.u.data().begin());
    std::copy(sb.state.v.data().begin(), sb.state.v.data().end(), cur.v.data().begin());
    const auto expected = reduce(balance_residuals(sa.state, cur, sb.state.t - sa.state.t, sa.params()), sa.state.t);
    const auto rows = lines_of(pair.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == format_double(expected.t) + ',' + format_double(expected.r_mass) + ',' +
                         format_double(expected.r_momx) + ',' + format_double(expected.r_momy) + ',' +
                         format_double(expected.r_energy));

    SUBCASE("identical snapshots leave only the flux divergences") {
        const auto same = run_cli({"residuals", a, a});
        const auto flux_only = reduce(balance_residuals(sa.state, sa.state, 1.0, sa.params()), sa.state.t);
        CHECK(lines_of(same.out)[1] == format_double(flux_only.t) + ',' + format_double(flux_only.r_mass) + ',' +
                                           format_double(flux_only.r_momx) + ',' + format_double(flux_only.r_momy) +
                                           ',' + format_double(flux_only.r_energy));
        CHECK(flux_only.r_mass > 0.0);
    }
    CHECK(run_cli({"residuals", b, a}).code == cli::kUsage);
    CHECK(run_cli({"residuals", a, (dir / "nope.bsq").string()}).code == cli::kIo);
}

TEST_CASE("sweep emits one row per alpha and the slopes") {
    const auto dir = scratch_dir("cli_sweep");
    const auto cfg = write_text(dir / "s.cfg", kSmall);
    const auto r = run_cli({"sweep", cfg.string(), "--alphas", "0.1,0.2,0.3", "--out", (dir / "t.csv").string()});
    CHECK(r.code == 0);
    const auto rows = lines_of(read_file(dir / "t.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "alpha,mass,momentum,energy,momx,momy,decay_exponent");
    CHECK(rows[1].rfind("0.10000000000000001,", 0) == 0);
    CHECK(rows[3].rfind("0.29999999999999999,", 0) == 0);
    CHECK(rows[4].rfind("#slopes,", 0) == 0);

    CHECK(run_cli({"sweep", cfg.string(), "--alphas", "0.1,x"}).code == cli::kUsage);
    CHECK(run_cli({"sweep", cfg.string(), "--alphas", "0.1,1.5"}).code == cli::kUsage);
}

TEST_CASE("profile at the surface returns the elevation") {
    const auto dir = scratch_dir("cli_prof");
    const auto cfg = write_text(dir / "s.cfg", kSmall);
    REQUIRE(run_cli({"simulate", cfg.string(), "--out", dir.string()}).code == 0);
    const auto snap = (dir / "snapshot_00000010.bsq").string();
    const auto r = run_cli({"profile", snap, "--z", "1", "--prev", (dir / "snapshot_00000005.bsq").string()});
    CHECK(r.code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 1 + 256);
    CHECK(rows[0] == "x,y,pressure,u,v");
    const Snapshot s = read_snapshot(snap);
    std::istringstream row(rows[1 + 17]);  // i = 1, j = 1
    std::string x, y, pressure;
    std::getline(row, x, ',');
    std::getline(row, y, ',');
    std::getline(row, pressure, ',');
    CHECK(std::stod(pressure) == s.state.eta(1, 1));

    CHECK(run_cli({"profile", snap, "--z", "-1"}).code == cli::kUsage);
    CHECK(run_cli({"profile", snap}).code == cli::kUsage);
}

TEST_CASE("decay-fit on an amplitude file") {
    const auto dir = scratch_dir("cli_fit");
    AmplitudeTrack t;
    for (int i = 0; i <= 30; ++i) {
        const double time = 2.0 + 0.3 * i;
        t.add(time, WavePeak{time, 3.0 / time});
    }
    write_amplitude_csv(t, dir / "a.csv");
    const auto r = run_cli({"decay-fit", (dir / "a.csv").string(), "--window", "4:10"});
    CHECK(r.code == 0);
    CHECK(std::stod(r.out) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(run_cli({"decay-fit", (dir / "a.csv").string(), "--window", "4-10"}).code == cli::kUsage);
    CHECK(run_cli({"decay-fit", (dir / "a.csv").string(), "--window", "20:30"}).code == cli::kUsage);
}

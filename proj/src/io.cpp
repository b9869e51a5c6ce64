#include "bsq/io.hpp"

#include "bsq/error.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace bsq {

namespace {

constexpr std::array<char, 4> kMagic{'B', 'S', 'Q', '1'};
constexpr std::array<char, 4> kCheckpointMagic{'B', 'S', 'Q', 'C'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string_view take(std::size_t n) {
        need(n);
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (remaining() < n) throw IoError("snapshot truncated");
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

void put_field(std::string& out, const ScalarField& f) {
    for (double v : f.data()) put_f64(out, v);
}

void get_field(Reader& r, ScalarField& f) {
    for (double& v : f.data()) v = r.f64();
}

}  // namespace

ModelParams Snapshot::params(bool dealias) const {
    return ModelParams::make(alpha, beta, theta2, lambda, mu, false, dealias);
}

std::string encode_snapshot(const State& s, const ModelParams& p) {
    s.check_consistent();
    const GridSpec& g = s.grid();
    std::string out;
    out.reserve(kSnapshotHeaderBytes + 3 * g.size() * 8);
    out.append(kMagic.data(), kMagic.size());
    put_u32(out, static_cast<std::uint32_t>(g.nx));
    put_u32(out, static_cast<std::uint32_t>(g.ny));
    for (double v : {g.lx, g.ly, g.x0, g.y0, s.t, p.alpha, p.beta, p.theta2, p.lambda, p.mu}) put_f64(out, v);
    put_field(out, s.eta);
    put_field(out, s.u);
    put_field(out, s.v);
    return out;
}

namespace {

Snapshot decode_prefix(Reader& r) {
    const auto magic = r.take(4);
    if (std::memcmp(magic.data(), kMagic.data(), 4) != 0) throw IoError("not a BSQ1 snapshot (bad magic)");
    const std::uint32_t nx = r.u32();
    const std::uint32_t ny = r.u32();
    double h[10];
    for (double& v : h) v = r.f64();

    GridPtr grid;
    try {
        grid = make_grid(nx, ny, h[0], h[1], h[2], h[3]);
    } catch (const ConfigError& e) {
        throw IoError(std::string("snapshot header describes an invalid grid: ") + e.what());
    }
    if (r.remaining() < 3ull * grid->size() * 8) throw IoError("snapshot payload truncated");

    Snapshot snap;
    snap.state = State::zero(grid, h[4]);
    snap.alpha = h[5];
    snap.beta = h[6];
    snap.theta2 = h[7];
    snap.lambda = h[8];
    snap.mu = h[9];
    get_field(r, snap.state.eta);
    get_field(r, snap.state.u);
    get_field(r, snap.state.v);
    return snap;
}

}  // namespace

Snapshot decode_snapshot(std::string_view bytes) {
    Reader r(bytes);
    Snapshot snap = decode_prefix(r);
    if (r.remaining() != 0) throw IoError("snapshot has trailing bytes");
    return snap;
}

void write_snapshot(const std::filesystem::path& path, const State& s, const ModelParams& p) {
    write_file_atomic(path, encode_snapshot(s, p));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    try {
        return decode_snapshot(read_file(path));
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::uint64_t config_hash(const SimConfig& cfg) {
    SimConfig key = cfg;
    key.t_end = 0.0;
    key.output_stride = 1;
    key.snapshot_stride = 1;
    const std::string text = print_config(key);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void write_checkpoint(const std::filesystem::path& path, const State& s, const SimConfig& cfg, std::uint64_t step) {
    std::string bytes = encode_snapshot(s, cfg.model());
    bytes.append(kCheckpointMagic.data(), kCheckpointMagic.size());
    put_u64(bytes, config_hash(cfg));
    put_u64(bytes, step);
    write_file_atomic(path, bytes);
}

Checkpoint read_checkpoint(const std::filesystem::path& path, const SimConfig& cfg) {
    const std::string bytes = read_file(path);
    Reader r(bytes);
    Checkpoint c;
    c.snapshot = decode_prefix(r);
    const auto magic = r.take(4);
    if (std::memcmp(magic.data(), kCheckpointMagic.data(), 4) != 0) {
        throw IoError(path.string() + ": missing checkpoint trailer");
    }
    c.config_hash = r.u64();
    c.step = r.u64();
    if (r.remaining() != 0) throw IoError(path.string() + ": checkpoint has trailing bytes");
    if (c.config_hash != config_hash(cfg)) {
        throw ConfigError(path.string() + ": checkpoint was written with a different configuration");
    }
    return c;
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct LineError {
    std::size_t line;
    std::string key;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("line " + std::to_string(line) + ": " + key + ": " + msg);
    }
};

double parse_plain_double(std::string_view s, const LineError& where) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) where.fail("malformed number '" + std::string(s) + "'");
    return v;
}

/// Accepts plain decimals and rationals such as 9/11.
double parse_real(std::string_view s, const LineError& where) {
    const auto slash = s.find('/');
    double v = 0.0;
    if (slash == std::string_view::npos) {
        v = parse_plain_double(s, where);
    } else {
        const double num = parse_plain_double(trim(s.substr(0, slash)), where);
        const double den = parse_plain_double(trim(s.substr(slash + 1)), where);
        if (den == 0.0) where.fail("zero denominator");
        v = num / den;
    }
    if (!std::isfinite(v)) where.fail("value must be finite");
    return v;
}

std::size_t parse_count(std::string_view s, const LineError& where) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) where.fail("expected a non-negative integer, got '" + std::string(s) + "'");
    return v;
}

bool parse_bool(std::string_view s, const LineError& where) {
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    where.fail("expected a boolean, got '" + std::string(s) + "'");
}

}  // namespace

SimConfig parse_config(std::string_view text) {
    SimConfig cfg;
    std::string ic_kind = "gaussian";
    GaussianIC gauss;
    PlaneWaveIC wave;
    FileIC file;
    std::optional<double> amplitude;

    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const LineError where{line_no, key};
        if (value.empty()) where.fail("missing value");
        if (!seen.insert(key).second) where.fail("duplicate key");

        auto grid_count = [&]() {
            const std::size_t n = parse_count(value, where);
            if (n % 2 != 0) where.fail(key + " must be even");
            if (n < 8) where.fail(key + " must be at least 8");
            return n;
        };
        auto positive = [&]() {
            const double v = parse_real(value, where);
            if (!(v > 0.0)) where.fail(key + " must be positive");
            return v;
        };
        auto stride = [&]() {
            const std::size_t n = parse_count(value, where);
            if (n < 1) where.fail(key + " must be >= 1");
            return n;
        };

        if (key == "nx") cfg.nx = grid_count();
        else if (key == "ny") cfg.ny = grid_count();
        else if (key == "lx") cfg.lx = positive();
        else if (key == "ly") cfg.ly = positive();
        else if (key == "x0") cfg.x0 = parse_real(value, where);
        else if (key == "y0") cfg.y0 = parse_real(value, where);
        else if (key == "alpha") cfg.alpha = parse_real(value, where);
        else if (key == "beta") cfg.beta = parse_real(value, where);
        else if (key == "theta2") cfg.theta2 = parse_real(value, where);
        else if (key == "lambda") cfg.lambda = parse_real(value, where);
        else if (key == "mu") cfg.mu = parse_real(value, where);
        else if (key == "linearized") cfg.linearized = parse_bool(value, where);
        else if (key == "dealias") cfg.dealias = parse_bool(value, where);
        else if (key == "dt") cfg.dt = positive();
        else if (key == "t_end") cfg.t_end = positive();
        else if (key == "output_stride") cfg.output_stride = stride();
        else if (key == "snapshot_stride") cfg.snapshot_stride = stride();
        else if (key == "initial_condition") {
            ic_kind = std::string(value);
            if (ic_kind != "gaussian" && ic_kind != "plane_wave" && ic_kind != "file") {
                where.fail("expected gaussian, plane_wave or file");
            }
        }
        else if (key == "ic_amplitude") amplitude = parse_real(value, where);
        else if (key == "ic_width") gauss.width = positive();
        else if (key == "ic_kx") wave.kx = parse_real(value, where);
        else if (key == "ic_ky") wave.ky = parse_real(value, where);
        else if (key == "ic_path") file.path = std::string(value);
        else where.fail("unknown key");
    }

    for (const char* required : {"alpha", "beta"}) {
        if (!seen.count(required)) throw ConfigError(std::string("missing required key '") + required + "'");
    }

    if (ic_kind == "gaussian") {
        if (amplitude) gauss.amplitude = *amplitude;
        cfg.initial_condition = gauss;
    } else if (ic_kind == "plane_wave") {
        if (amplitude) wave.amplitude = *amplitude;
        cfg.initial_condition = wave;
    } else {
        cfg.initial_condition = file;
    }

    try {
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::string print_config(const SimConfig& cfg) {
    std::ostringstream os;
    auto real = [&](const char* k, double v) { os << k << " = " << format_double(v) << '\n'; };
    auto count = [&](const char* k, std::size_t v) { os << k << " = " << v << '\n'; };
    auto flag = [&](const char* k, bool v) { os << k << " = " << (v ? "true" : "false") << '\n'; };

    count("nx", cfg.nx);
    count("ny", cfg.ny);
    real("lx", cfg.lx);
    real("ly", cfg.ly);
    real("x0", cfg.x0);
    real("y0", cfg.y0);
    real("alpha", cfg.alpha);
    real("beta", cfg.beta);
    real("theta2", cfg.theta2);
    real("lambda", cfg.lambda);
    real("mu", cfg.mu);
    flag("linearized", cfg.linearized);
    flag("dealias", cfg.dealias);
    real("dt", cfg.dt);
    real("t_end", cfg.t_end);
    count("output_stride", cfg.output_stride);
    count("snapshot_stride", cfg.snapshot_stride);
    if (const auto* g = std::get_if<GaussianIC>(&cfg.initial_condition)) {
        os << "initial_condition = gaussian\n";
        real("ic_amplitude", g->amplitude);
        real("ic_width", g->width);
    } else if (const auto* w = std::get_if<PlaneWaveIC>(&cfg.initial_condition)) {
        os << "initial_condition = plane_wave\n";
        real("ic_amplitude", w->amplitude);
        real("ic_kx", w->kx);
        real("ic_ky", w->ky);
    } else {
        os << "initial_condition = file\n";
        os << "ic_path = " << std::get<FileIC>(cfg.initial_condition).path << '\n';
    }
    return os.str();
}

SimConfig load_config(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return parse_config(text);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(tmp.string() + ": cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError(tmp.string() + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError(path.string() + ": cannot move temporary file into place");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError(path.string() + ": read failed");
    return ss.str();
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path, std::string_view header,
                                                  std::size_t columns) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != header) {
        throw IoError(path.string() + ": expected header '" + std::string(header) + "'");
    }
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= t.size()) {
            const auto comma = t.find(',', start);
            const auto cell = trim(t.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw IoError(path.string() + ": line " + std::to_string(line_no) + ": malformed number");
            }
            row.push_back(v);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (row.size() != columns) {
            throw IoError(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                          std::to_string(columns) + " columns");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void write_residual_csv(const ResidualSeries& series, const std::filesystem::path& path, ResidualNorm norm) {
    if (series.empty()) throw UsageError("cannot write an empty residual series");
    const bool linf = norm == ResidualNorm::Linf;
    std::string out = linf ? "t,r_mass,r_momx,r_momy,r_energy\n" : "t,l2_mass,l2_momx,l2_momy,l2_energy\n";
    auto row = [&](std::string first, const BalanceSample& s) {
        out += first;
        const double cols[4] = {linf ? s.r_mass : s.l2_mass, linf ? s.r_momx : s.l2_momx,
                                linf ? s.r_momy : s.l2_momy, linf ? s.r_energy : s.l2_energy};
        for (double c : cols) {
            out += ',';
            out += format_double(c);
        }
        out += '\n';
    };
    for (const auto& s : series.samples()) row(format_double(s.t), s);
    row("#max", series.summary());
    write_file_atomic(path, out);
}

ResidualSeries read_residual_csv(const std::filesystem::path& path) {
    ResidualSeries series;
    for (const auto& r : read_numeric_csv(path, "t,r_mass,r_momx,r_momy,r_energy", 5)) {
        BalanceSample s;
        s.t = r[0];
        s.r_mass = r[1];
        s.r_momx = r[2];
        s.r_momy = r[3];
        s.r_energy = r[4];
        series.add(s);
    }
    return series;
}

void write_amplitude_csv(const AmplitudeTrack& track, const std::filesystem::path& path) {
    std::string out = "t,radius,amplitude\n";
    for (std::size_t i = 0; i < track.times.size(); ++i) {
        out += format_double(track.times[i]) + ',' + format_double(track.radii[i]) + ',' +
               format_double(track.amplitudes[i]) + '\n';
    }
    write_file_atomic(path, out);
}

AmplitudeTrack read_amplitude_csv(const std::filesystem::path& path) {
    AmplitudeTrack track;
    for (const auto& r : read_numeric_csv(path, "t,radius,amplitude", 3)) {
        track.times.push_back(r[0]);
        track.radii.push_back(r[1]);
        track.amplitudes.push_back(r[2]);
    }
    return track;
}

}  // namespace bsq

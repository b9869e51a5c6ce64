#pragma once

#include "bsq/diagnostics.hpp"
#include "bsq/integrator.hpp"
#include "bsq/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace bsq {

// ---------------------------------------------------------------------------
// Snapshot files
//
//   offset  size        content
//   0       4           "BSQ1"
//   4       4 + 4       nx, ny            (uint32, little-endian)
//   12      10 * 8      lx ly x0 y0 t alpha beta theta2 lambda mu  (float64 LE)
//   92      3*nx*ny*8   eta, U, V row-major (float64 LE)
// ---------------------------------------------------------------------------

struct Snapshot {
    State state;
    double alpha = 0.0;
    double beta = 0.0;
    double theta2 = 0.0;
    double lambda = 0.0;
    double mu = 0.0;

    ModelParams params(bool dealias = true) const;
};

inline constexpr std::size_t kSnapshotHeaderBytes = 92;

std::string encode_snapshot(const State& s, const ModelParams& p);
Snapshot decode_snapshot(std::string_view bytes);

void write_snapshot(const std::filesystem::path& path, const State& s, const ModelParams& p);
Snapshot read_snapshot(const std::filesystem::path& path);

/// A snapshot followed by "BSQC", a 64-bit hash of the dynamics-relevant
/// configuration and the step counter, so a restart can refuse a checkpoint
/// taken under a different setup.
struct Checkpoint {
    Snapshot snapshot;
    std::uint64_t config_hash = 0;
    std::uint64_t step = 0;
};

/// FNV-1a over the printed configuration, ignoring t_end and output strides.
std::uint64_t config_hash(const SimConfig& cfg);

void write_checkpoint(const std::filesystem::path& path, const State& s, const SimConfig& cfg, std::uint64_t step);
/// Throws ConfigError when the stored hash does not match `cfg`.
Checkpoint read_checkpoint(const std::filesystem::path& path, const SimConfig& cfg);

// ---------------------------------------------------------------------------
// Run configuration files: one `key = value` per line, `#` starts a comment.
// ---------------------------------------------------------------------------

/// Parses and validates; alpha and beta are required, every other key has a
/// default. Errors are ConfigError messages of the form "line N: key: ...".
SimConfig parse_config(std::string_view text);
std::string print_config(const SimConfig& cfg);
SimConfig load_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Time series
// ---------------------------------------------------------------------------

enum class ResidualNorm { Linf, L2 };

/// Header `t,r_mass,r_momx,r_momy,r_energy`, one row per sample and a final
/// `#max` row; 17 significant digits; written atomically.
void write_residual_csv(const ResidualSeries& series, const std::filesystem::path& path,
                        ResidualNorm norm = ResidualNorm::Linf);
ResidualSeries read_residual_csv(const std::filesystem::path& path);

/// Header `t,radius,amplitude`.
void write_amplitude_csv(const AmplitudeTrack& track, const std::filesystem::path& path);
AmplitudeTrack read_amplitude_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// printf("%.17g")
std::string format_double(double v);

}  // namespace bsq

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qe/common.hpp"
#include "qe/ledger.hpp"
#include "qe/montecarlo.hpp"
#include "qe/screen.hpp"

namespace qe {

/// Shortest exact decimal form that round-trips a double ("%.17g").
std::string format_g17(double value);

/// 16-digit lower-case hex form of a 64-bit value (config hashes).
std::string hex16(std::uint64_t value);

/// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// FNV-1a 64-bit over a file's raw contents. Throws config_error when the
/// file cannot be read.
std::uint64_t file_checksum(const std::filesystem::path& path);

// All writers emit '\n' line endings and "%.17g" floats, so outputs are
// byte-identical across runs; all readers reject malformed lines with a
// config_error naming the line number.

/// `x_m,density` rows. The normalization is recomputed on read.
void write_pattern_csv(const std::filesystem::path& path,
                       const Pattern& pattern);
Pattern read_pattern_csv(const std::filesystem::path& path);

/// `timestamp_s,detector,value,basis` rows; detector is "screen_a" or
/// "pol_b", basis is a PolarizationBasis label or "none".
void write_events_csv(const std::filesystem::path& path,
                      const std::vector<DetectionEvent>& events);
std::vector<DetectionEvent> read_events_csv(const std::filesystem::path& path);

/// Provenance header `# seed=<u64> config_hash=<16 hex>` followed by
/// `pair_id,a_bin,b_basis,b_outcome` rows. All fields round-trip exactly.
void write_ledger_csv(const std::filesystem::path& path, const Ledger& ledger);
Ledger read_ledger_csv(const std::filesystem::path& path);

}  // namespace qe

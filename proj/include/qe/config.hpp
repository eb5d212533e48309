#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "qe/basis.hpp"
#include "qe/common.hpp"
#include "qe/montecarlo.hpp"
#include "qe/screen.hpp"
#include "qe/state.hpp"

namespace qe {

enum class Preset { young, marked, eraser, delayed };

std::string preset_label(Preset preset);
Preset parse_preset(const std::string& text);

/// Complete description of one experiment run. Serializes to a versioned
/// JSON file; all quantities are SI base units with no unit-suffix parsing
/// (the suffixes live in the key names as documentation).
struct ExperimentConfig {
  int schema_version = 1;
  Preset preset = Preset::eraser;
  PhaseConvention source = PhaseConvention::singlet;
  ScreenGeometry geometry{};
  /// Fast-axis angles of the slit1 / slit2 quarter-wave plates, radians.
  /// Required for marked/eraser/delayed, forbidden for young.
  std::optional<std::array<double, 2>> qwp_angles;
  /// Analyzer used for the analytic coincidence pattern; young preset only.
  std::optional<std::pair<PolarizationBasis, Outcome>> b_condition;
  /// Present = sampled mode (events + ledger on top of the analytic
  /// patterns). Required for delayed.
  std::optional<SamplerConfig> sampler;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  /// Preset rules and sampler ranges (config_error) plus geometry physics
  /// (contract_error).
  void validate() const;
};

/// Canonical preset configurations: young (no plates, H/V coincidence
/// condition), marked (plates at +-45 deg), eraser (plates plus the two
/// diagonal conditions), delayed (plates plus a sampler with an alternating
/// HV/DIAG analyzer schedule).
ExperimentConfig default_config(Preset preset);

/// JSON form of the config, key order fixed; the exact bytes of
/// save_config and the input to config_hash.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

/// Inverse of config_to_json. Rejects unknown keys, wrong types, and values
/// out of schema with a field-path diagnostic (config_error). The result is
/// validated.
ExperimentConfig config_from_json(const nlohmann::ordered_json& json);

void save_config(const std::filesystem::path& path,
                 const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 over the canonical JSON with output_dir removed: two configs
/// hash equal exactly when they describe the same physics and sampling,
/// wherever their outputs land. Stamped into ledgers to guard delayed
/// comparisons.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace qe

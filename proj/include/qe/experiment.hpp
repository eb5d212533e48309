#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qe/config.hpp"
#include "qe/ledger.hpp"
#include "qe/montecarlo.hpp"
#include "qe/screen.hpp"
#include "qe/state.hpp"

namespace qe {

/// Prepares the state a run analyzes: source pair, double slit, then the
/// configured quarter-wave plates (when the preset has them).
TwoPhotonState build_state(const ExperimentConfig& config);

struct RunArtifacts {
  std::filesystem::path directory;
  nlohmann::ordered_json report;
  std::vector<std::string> files;  // names written into directory
};

/// Executes a validated config end to end: analytic patterns for the
/// preset, sampled events/ledger when a sampler is configured, and
/// report.json with visibility, distinguishability, the duality check, and
/// partition-identity residuals. Output is deterministic: rerunning the
/// same config rewrites byte-identical files.
RunArtifacts run_experiment(const ExperimentConfig& config);

/// The report subcommand's payload: reads a ledger, refuses it on
/// seed/config-hash mismatch (mismatch_error), and returns subset summaries
/// plus delayed_equals_prompt verdicts. Requires a sampled-mode config.
nlohmann::ordered_json report_from_ledger(
    const std::filesystem::path& ledger_path, const ExperimentConfig& config,
    const std::vector<SubsetSelector>& selectors);

enum class SweepMode { marking_angle, retardance };

SweepMode parse_sweep_mode(const std::string& text);

struct DualityPoint {
  double parameter = 0.0;  // QWP angle or common retardance, radians
  double visibility = 0.0;
  double distinguishability = 0.0;
};

/// Sweeps the marking strength from none to full and records (V, D) per
/// point. marking_angle: plates at (alpha, -alpha), alpha in [0, pi/4].
/// retardance: plates at +-45 deg with common retardance in [0, pi/2].
/// V is the envelope-corrected contrast of the marginal (unconditioned)
/// pattern over the central fringe period — the quantity that obeys
/// V^2 + D^2 <= 1.
std::vector<DualityPoint> duality_sweep(const ExperimentConfig& base,
                                        SweepMode mode,
                                        std::size_t point_count);

/// CSV rows `parameter_rad,visibility,distinguishability,duality_sum`.
std::string sweep_to_csv(const std::vector<DualityPoint>& points);

}  // namespace qe

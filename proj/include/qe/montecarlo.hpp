#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qe/basis.hpp"
#include "qe/common.hpp"
#include "qe/screen.hpp"
#include "qe/state.hpp"

namespace qe {

enum class DetectorId { screen_a, pol_b };

/// One detector click.
struct DetectionEvent {
  double timestamp = 0.0;  // seconds since run start
  DetectorId detector = DetectorId::screen_a;
  /// screen_a: index of the screen cell that fired (grid cell i covers
  /// [x_i, x_{i+1})). pol_b: 0 = first outcome, 1 = second.
  int value = 0;
  /// Analyzer basis in effect at detection; empty on screen_a events.
  std::optional<PolarizationBasis> analyzer;

  bool operator==(const DetectionEvent&) const = default;
};

/// Per-pair choice of photon b's analyzer basis: bases are cycled in blocks,
/// pair k uses bases[(k / block_length) % bases.size()].
struct BasisSchedule {
  std::vector<PolarizationBasis> bases{PolarizationBasis::hv()};
  std::uint64_t block_length = 1;

  bool operator==(const BasisSchedule&) const = default;

  const PolarizationBasis& at(std::uint64_t pair_index) const;
};

struct SamplerConfig {
  std::uint64_t pair_count = 0;
  double pair_rate = 1.0e4;            // mean pairs per second
  double coincidence_window = 1.0e-9;  // seconds
  BasisSchedule schedule{};
  std::uint64_t rng_seed = 0;
  double efficiency_a = 1.0;
  double efficiency_b = 1.0;
  /// Detector time jitter: Gaussian, truncated at +-4 sigma. Zero disables.
  double jitter_sigma = 1.0e-10;  // seconds

  bool operator==(const SamplerConfig&) const = default;

  /// Throws config_error on out-of-range values.
  void validate() const;
};

struct SampleResult {
  std::vector<DetectionEvent> events_a;  // time-sorted
  std::vector<DetectionEvent> events_b;  // time-sorted
};

/// Samples pair emissions from the joint analytic distribution.
///
/// Per pair: photon b's outcome is drawn in the scheduled basis, then photon
/// a's screen cell from the matching conditional pattern via inverse-CDF
/// over the cell probabilities of `x_grid`. Emission times are Poisson
/// (exponential inter-arrival at pair_rate); each detection time gets
/// independent truncated-Gaussian jitter; detector efficiencies thin the
/// streams independently.
///
/// Deterministic for a fixed (state, geometry, config, grid): pairs are
/// produced in fixed-size shards, shard s seeded with rng_seed XOR s, and
/// the shard outputs concatenated in shard order before the final time
/// sort. worker_hint only sets how many shards run concurrently (0 =
/// hardware default); it must not and does not affect the result.
SampleResult sample_pairs(const TwoPhotonState& state,
                          const ScreenGeometry& geometry,
                          const SamplerConfig& config,
                          const std::vector<double>& x_grid,
                          unsigned worker_hint = 0);

/// Greedy earliest-first coincidence pairing of two time-sorted streams:
/// the earliest unpaired pair of events with |t_a - t_b| <= window is
/// matched, each event used at most once. Inputs must be time-sorted
/// (contract_error otherwise); the result is ordered by time and is
/// symmetric in the two streams.
std::vector<std::pair<DetectionEvent, DetectionEvent>> coincidences(
    const std::vector<DetectionEvent>& events_a,
    const std::vector<DetectionEvent>& events_b, double window);

/// Probability of each grid cell (trapezoidal mass of density between
/// adjacent grid points), normalized to sum to exactly 1. Shared by the
/// sampler and every test that compares histograms against a pattern.
std::vector<double> cell_probabilities(const Pattern& pattern);

}  // namespace qe

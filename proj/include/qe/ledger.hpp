#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qe/basis.hpp"
#include "qe/common.hpp"
#include "qe/montecarlo.hpp"
#include "qe/rng.hpp"
#include "qe/screen.hpp"
#include "qe/state.hpp"

namespace qe {

/// One coincidence, as the delayed-choice bookkeeping sees it: where photon
/// a landed, and in which basis / with which outcome photon b was measured.
struct LedgerRecord {
  std::uint64_t pair_id = 0;
  int a_position_bin = 0;
  PolarizationBasis b_basis{};
  Outcome b_outcome = Outcome::first;
};

/// Append-only record of coincidences, stamped with the provenance of the
/// run that produced it (RNG seed and configuration hash). Records are
/// never mutated or reordered after being appended; re-sorting for analysis
/// always works on a copy of the indices.
class Ledger {
 public:
  Ledger() = default;
  Ledger(std::uint64_t seed, std::uint64_t config_hash)
      : seed_(seed), config_hash_(config_hash) {}

  void append(const LedgerRecord& record) { records_.push_back(record); }
  const std::vector<LedgerRecord>& records() const { return records_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t config_hash() const { return config_hash_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t config_hash_ = 0;
  std::vector<LedgerRecord> records_;
};

/// Which ledger records to keep when re-sorting: either everything, or one
/// analyzer outcome of one basis.
struct SubsetSelector {
  std::optional<std::pair<PolarizationBasis, Outcome>> filter;

  static SubsetSelector all() { return {}; }
  static SubsetSelector of(const PolarizationBasis& basis, Outcome which) {
    return {std::make_pair(basis, which)};
  }

  /// Accepts "all", "+45", "-45", "H", "V", "R", "L". Throws config_error
  /// on anything else.
  static SubsetSelector parse(const std::string& text);

  std::string label() const;
  bool matches(const LedgerRecord& record) const;
};

/// Builds the ledger from coincidence pairs: pair_id in coincidence order,
/// position bin from the screen event, basis and outcome from the analyzer
/// event.
Ledger build_ledger(
    const std::vector<std::pair<DetectionEvent, DetectionEvent>>& pairs,
    std::uint64_t seed, std::uint64_t config_hash);

/// Histogram (bin -> count) of a_position_bin over the selected records.
/// Bins outside [0, bin_count) throw contract_error.
std::vector<std::uint64_t> sort_subsets(const Ledger& ledger,
                                        const SubsetSelector& selector,
                                        std::size_t bin_count);

/// Envelope-corrected fringe contrast of per-cell values (counts, expected
/// counts, or probabilities) over the central fringe period. Cells are the
/// intervals of x_grid, evaluated at their centers.
double cell_fringe_visibility(const std::vector<double>& cell_values,
                              const std::vector<double>& x_grid,
                              const ScreenGeometry& geometry);

/// Verdict of one delayed-choice subset comparison.
struct SubsetVerdict {
  std::string selector;
  std::uint64_t count = 0;
  bool bit_exact = false;     // delayed histogram == prompt histogram
  double max_abs_z = 0.0;     // against the analytic conditional pattern
  double visibility = 0.0;    // envelope-corrected, central fringe window
  double visibility_floor = 0.0;  // statistical threshold 3/sqrt(mean count)
  bool expects_fringes = false;
  bool pass = false;
};

struct DelayedComparison {
  std::vector<SubsetVerdict> subsets;
  double full_max_abs_z = 0.0;  // unsorted histogram vs. marginal pattern
  bool pass = false;
};

/// Checks that sorting the ledger after the fact reproduces per-subset
/// exactly what prompt filtering during the run produces, and that each
/// subset follows its analytic conditional pattern.
///
/// The run is replayed deterministically from (state, geometry, config):
/// the prompt side filters coincidences inline, the delayed side goes
/// through the ledger. A ledger whose seed or config hash does not match
/// throws mismatch_error. Subsets whose basis erases path information must
/// show fringes (visibility above the statistical floor); marking bases
/// must not.
DelayedComparison delayed_equals_prompt(const Ledger& ledger,
                                        const TwoPhotonState& state,
                                        const ScreenGeometry& geometry,
                                        const SamplerConfig& config,
                                        const std::vector<double>& x_grid,
                                        std::uint64_t config_hash);

/// Per-pair hidden-variable model used as the classical control: each pair
/// carries a definite, anti-correlated H/V assignment; each analyzer
/// transmits by Malus' law applied to that assignment, independently on the
/// two sides.
struct ClassicalCoinModel {
  /// Samples both analyzers at the same angle from horizontal; returns
  /// (outcome a, outcome b).
  static std::pair<Outcome, Outcome> sample_pair(double analyzer_angle,
                                                 Xoshiro256pp& rng);
};

struct CorrelationPoint {
  double analyzer_angle = 0.0;   // both analyzers, radians from horizontal
  double p_same_quantum = 0.0;   // sampled from the singlet state
  double p_same_classical = 0.0; // sampled from ClassicalCoinModel
  double p_same_quantum_exact = 0.0;  // analytic singlet value
};

/// Samples P(same outcome) for the singlet state and for the classical coin
/// model with both analyzers at the same angle, n pairs per angle.
std::vector<CorrelationPoint> classical_vs_quantum(
    const std::vector<double>& analyzer_angles, std::uint64_t pairs_per_angle,
    std::uint64_t seed);

}  // namespace qe

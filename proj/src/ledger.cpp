#include "qe/ledger.hpp"

#include <algorithm>
#include <cmath>

#include "qe/rng.hpp"

namespace qe {

namespace {

/// Distinct (basis, outcome) pairs reachable through a schedule, in first-
/// appearance order.
std::vector<std::pair<PolarizationBasis, Outcome>> schedule_subsets(
    const BasisSchedule& schedule) {
  std::vector<std::pair<PolarizationBasis, Outcome>> subsets;
  for (const PolarizationBasis& basis : schedule.bases) {
    for (Outcome which : {Outcome::first, Outcome::second}) {
      const bool seen =
          std::any_of(subsets.begin(), subsets.end(), [&](const auto& s) {
            return s.first == basis && s.second == which;
          });
      if (!seen) subsets.emplace_back(basis, which);
    }
  }
  return subsets;
}

/// Largest |z| of a histogram against expected counts total * probs, over
/// bins with expectation >= 10 (below that the normal approximation to the
/// Poisson bin count is not trustworthy).
double max_abs_z(const std::vector<std::uint64_t>& hist,
                 const std::vector<double>& probs, double total) {
  double worst = 0.0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double expected = total * probs[i];
    if (expected < 10.0) continue;
    const double z =
        (static_cast<double>(hist[i]) - expected) / std::sqrt(expected);
    worst = std::max(worst, std::abs(z));
  }
  return worst;
}

std::vector<double> cell_centers(const std::vector<double>& x_grid) {
  std::vector<double> centers(x_grid.size() - 1);
  for (std::size_t i = 0; i + 1 < x_grid.size(); ++i)
    centers[i] = 0.5 * (x_grid[i] + x_grid[i + 1]);
  return centers;
}

}  // namespace

double cell_fringe_visibility(const std::vector<double>& cell_values,
                              const std::vector<double>& x_grid,
                              const ScreenGeometry& geometry) {
  if (cell_values.size() + 1 != x_grid.size())
    throw contract_error("cell values do not match the grid's cell count");
  Pattern pseudo;
  pseudo.x_grid = cell_centers(x_grid);
  pseudo.density = cell_values;
  const double half = geometry.fringe_period() / 2.0;
  return fringe_visibility(pseudo, geometry, -half, half);
}

SubsetSelector SubsetSelector::parse(const std::string& text) {
  if (text == "all") return all();
  if (text == "+45") return of(PolarizationBasis::diagonal(), Outcome::first);
  if (text == "-45") return of(PolarizationBasis::diagonal(), Outcome::second);
  if (text == "H") return of(PolarizationBasis::hv(), Outcome::first);
  if (text == "V") return of(PolarizationBasis::hv(), Outcome::second);
  if (text == "R") return of(PolarizationBasis::circular(), Outcome::first);
  if (text == "L") return of(PolarizationBasis::circular(), Outcome::second);
  throw config_error("unknown subset selector: '" + text + "'");
}

std::string SubsetSelector::label() const {
  if (!filter) return "all";
  const auto& [basis, which] = *filter;
  const bool first = which == Outcome::first;
  switch (basis.kind()) {
    case PolarizationBasis::Kind::hv:
      return first ? "H" : "V";
    case PolarizationBasis::Kind::diagonal:
      return first ? "+45" : "-45";
    case PolarizationBasis::Kind::circular:
      return first ? "R" : "L";
    case PolarizationBasis::Kind::linear:
      break;
  }
  return basis.label() + (first ? ":first" : ":second");
}

bool SubsetSelector::matches(const LedgerRecord& record) const {
  if (!filter) return true;
  return filter->first == record.b_basis && filter->second == record.b_outcome;
}

Ledger build_ledger(
    const std::vector<std::pair<DetectionEvent, DetectionEvent>>& pairs,
    std::uint64_t seed, std::uint64_t config_hash) {
  Ledger ledger(seed, config_hash);
  std::uint64_t pair_id = 0;
  for (const auto& [screen_event, analyzer_event] : pairs) {
    if (screen_event.detector != DetectorId::screen_a ||
        analyzer_event.detector != DetectorId::pol_b)
      throw contract_error(
          "coincidence pair must combine a screen event with an analyzer "
          "event");
    if (!analyzer_event.analyzer)
      throw contract_error("analyzer event carries no basis tag");
    ledger.append(LedgerRecord{
        pair_id++, screen_event.value, *analyzer_event.analyzer,
        analyzer_event.value == 0 ? Outcome::first : Outcome::second});
  }
  return ledger;
}

std::vector<std::uint64_t> sort_subsets(const Ledger& ledger,
                                        const SubsetSelector& selector,
                                        std::size_t bin_count) {
  std::vector<std::uint64_t> histogram(bin_count, 0);
  for (const LedgerRecord& record : ledger.records()) {
    if (!selector.matches(record)) continue;
    if (record.a_position_bin < 0 ||
        static_cast<std::size_t>(record.a_position_bin) >= bin_count)
      throw contract_error("ledger record bin outside the histogram range");
    ++histogram[static_cast<std::size_t>(record.a_position_bin)];
  }
  return histogram;
}

DelayedComparison delayed_equals_prompt(const Ledger& ledger,
                                        const TwoPhotonState& state,
                                        const ScreenGeometry& geometry,
                                        const SamplerConfig& config,
                                        const std::vector<double>& x_grid,
                                        std::uint64_t config_hash) {
  if (ledger.seed() != config.rng_seed)
    throw mismatch_error("ledger seed does not match the run configuration");
  if (ledger.config_hash() != config_hash)
    throw mismatch_error(
        "ledger config hash does not match the run configuration");

  // Prompt side: replay the run and filter while the pairs stream past.
  const SampleResult replay = sample_pairs(state, geometry, config, x_grid);
  const auto pairs =
      coincidences(replay.events_a, replay.events_b, config.coincidence_window);

  const std::size_t bin_count = x_grid.size() - 1;
  const auto subsets = schedule_subsets(config.schedule);
  std::vector<std::vector<std::uint64_t>> prompt(
      subsets.size(), std::vector<std::uint64_t>(bin_count, 0));
  std::vector<std::uint64_t> prompt_full(bin_count, 0);
  for (const auto& [screen_event, analyzer_event] : pairs) {
    const auto bin = static_cast<std::size_t>(screen_event.value);
    ++prompt_full[bin];
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      if (analyzer_event.analyzer == subsets[s].first &&
          (analyzer_event.value == 0 ? Outcome::first : Outcome::second) ==
              subsets[s].second) {
        ++prompt[s][bin];
        break;
      }
    }
  }

  const auto centers = cell_centers(x_grid);
  DelayedComparison comparison;
  bool all_pass = true;

  for (std::size_t s = 0; s < subsets.size(); ++s) {
    const auto& [basis, which] = subsets[s];
    const SubsetSelector selector = SubsetSelector::of(basis, which);
    const auto delayed = sort_subsets(ledger, selector, bin_count);

    SubsetVerdict verdict;
    verdict.selector = selector.label();
    verdict.bit_exact = delayed == prompt[s];
    for (std::uint64_t count : delayed) verdict.count += count;

    // Analytic conditional for this subset.
    const Pattern analytic = pattern_conditional(
        state, ProjectorSpec{Photon::b, basis, which}, geometry, x_grid);
    const auto probs = cell_probabilities(analytic);
    verdict.max_abs_z =
        max_abs_z(delayed, probs, static_cast<double>(verdict.count));

    // Fringe visibility over the central period, against the analytic value
    // at identical binning. The floor is the statistical resolution of the
    // contrast: 3 / sqrt(mean count per cell in the window).
    const double half = geometry.fringe_period() / 2.0;
    double window_total = 0.0;
    std::size_t window_cells = 0;
    std::vector<double> measured(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
      measured[i] = static_cast<double>(delayed[i]);
      if (centers[i] >= -half && centers[i] <= half) {
        window_total += measured[i];
        ++window_cells;
      }
    }
    const double exact = cell_fringe_visibility(probs, x_grid, geometry);
    bool visibility_ok = true;
    if (window_total > 0.0 && window_cells > 0) {
      verdict.visibility = cell_fringe_visibility(measured, x_grid, geometry);
      verdict.visibility_floor =
          3.0 / std::sqrt(window_total / static_cast<double>(window_cells));
      verdict.expects_fringes = exact > 0.5;
      visibility_ok =
          std::abs(verdict.visibility - exact) <= verdict.visibility_floor;
    }

    verdict.pass =
        verdict.bit_exact && verdict.max_abs_z < 5.0 && visibility_ok;
    all_pass = all_pass && verdict.pass;
    comparison.subsets.push_back(std::move(verdict));
  }

  // Unsorted histogram against the marginal pattern.
  const Pattern marginal =
      pattern_conditional(state, std::nullopt, geometry, x_grid);
  std::uint64_t full_total = 0;
  const auto full_hist = sort_subsets(ledger, SubsetSelector::all(), bin_count);
  for (std::uint64_t count : full_hist) full_total += count;
  comparison.full_max_abs_z =
      max_abs_z(full_hist, cell_probabilities(marginal),
                static_cast<double>(full_total));

  comparison.pass = all_pass && comparison.full_max_abs_z < 5.0 &&
                    full_hist == prompt_full;
  return comparison;
}

std::pair<Outcome, Outcome> ClassicalCoinModel::sample_pair(
    double analyzer_angle, Xoshiro256pp& rng) {
  // Anti-correlated definite assignment: one photon H, the other V.
  const bool a_is_h = rng.uniform01() < 0.5;
  const double c2 = std::cos(analyzer_angle) * std::cos(analyzer_angle);
  const double s2 = 1.0 - c2;
  const double p_first_a = a_is_h ? c2 : s2;
  const double p_first_b = a_is_h ? s2 : c2;
  const Outcome out_a =
      rng.uniform01() < p_first_a ? Outcome::first : Outcome::second;
  const Outcome out_b =
      rng.uniform01() < p_first_b ? Outcome::first : Outcome::second;
  return {out_a, out_b};
}

std::vector<CorrelationPoint> classical_vs_quantum(
    const std::vector<double>& analyzer_angles, std::uint64_t pairs_per_angle,
    std::uint64_t seed) {
  if (pairs_per_angle == 0)
    throw config_error("pairs_per_angle must be positive");

  const TwoPhotonState singlet = make_entangled_source(PhaseConvention::singlet);
  Xoshiro256pp rng(seed);
  std::vector<CorrelationPoint> table;
  table.reserve(analyzer_angles.size());

  for (double angle : analyzer_angles) {
    const PolarizationBasis basis = PolarizationBasis::linear(angle);
    const ProjectorSpec a_first{Photon::a, basis, Outcome::first};
    const ProjectorSpec a_second{Photon::a, basis, Outcome::second};
    const ProjectorSpec b_first{Photon::b, basis, Outcome::first};

    const double p_a_first = outcome_probability(singlet, a_first);
    const double p_b_first_given_first =
        outcome_probability(project(singlet, a_first).state, b_first);
    const double p_b_first_given_second =
        outcome_probability(project(singlet, a_second).state, b_first);

    CorrelationPoint point;
    point.analyzer_angle = angle;
    point.p_same_quantum_exact =
        p_a_first * p_b_first_given_first +
        (1.0 - p_a_first) * (1.0 - p_b_first_given_second);

    std::uint64_t same_quantum = 0;
    for (std::uint64_t k = 0; k < pairs_per_angle; ++k) {
      const bool a_first_fired = rng.uniform01() < p_a_first;
      const double p_b =
          a_first_fired ? p_b_first_given_first : p_b_first_given_second;
      const bool b_first_fired = rng.uniform01() < p_b;
      if (a_first_fired == b_first_fired) ++same_quantum;
    }

    std::uint64_t same_classical = 0;
    for (std::uint64_t k = 0; k < pairs_per_angle; ++k) {
      const auto [out_a, out_b] = ClassicalCoinModel::sample_pair(angle, rng);
      if (out_a == out_b) ++same_classical;
    }

    const double n = static_cast<double>(pairs_per_angle);
    point.p_same_quantum = static_cast<double>(same_quantum) / n;
    point.p_same_classical = static_cast<double>(same_classical) / n;
    table.push_back(point);
  }
  return table;
}

}  // namespace qe

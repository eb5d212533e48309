#include "qe/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>

#include "qe/csvio.hpp"
#include "qe/optics.hpp"

namespace qe {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kQuarter = std::numbers::pi / 4.0;

struct FringeWindow {
  double lo;
  double hi;
};

FringeWindow central_window(const ScreenGeometry& geometry) {
  const double half = geometry.fringe_period() / 2.0;
  return {-half, half};
}

ProjectorSpec b_spec(const PolarizationBasis& basis, Outcome which) {
  return ProjectorSpec{Photon::b, basis, which};
}

/// Largest pointwise gap between the probability-weighted sum of the two
/// conditional patterns of `basis` and the marginal pattern — the partition
/// identity that makes erasure bookkeeping, not physics.
double partition_residual(const TwoPhotonState& state,
                          const PolarizationBasis& basis,
                          const ScreenGeometry& geometry,
                          const std::vector<double>& x_grid,
                          const Pattern& marginal) {
  std::vector<double> weighted(x_grid.size(), 0.0);
  for (Outcome which : {Outcome::first, Outcome::second}) {
    const double p = outcome_probability(state, b_spec(basis, which));
    if (p < kProbabilityFloor) continue;
    const Pattern conditional =
        pattern_conditional(state, b_spec(basis, which), geometry, x_grid);
    for (std::size_t i = 0; i < x_grid.size(); ++i)
      weighted[i] += p * conditional.density[i];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < x_grid.size(); ++i)
    worst = std::max(worst, std::abs(weighted[i] - marginal.density[i]));
  return worst;
}

/// Grid index of the fringe extremum within the window, located on the
/// envelope-normalized density: the single-slit envelope tilts raw crests
/// toward x = 0 by a couple of grid steps, while the oscillation's phase --
/// the thing fringe/antifringe comparisons care about -- is a property of
/// density / (|f1|^2 + |f2|^2).
std::size_t extremum_index(const Pattern& pattern,
                           const ScreenGeometry& geometry,
                           const FringeWindow& window, bool maximum) {
  std::size_t best = pattern.x_grid.size();
  double best_value = 0.0;
  for (std::size_t i = 0; i < pattern.x_grid.size(); ++i) {
    const double x = pattern.x_grid[i];
    if (x < window.lo || x > window.hi) continue;
    const double reference =
        std::norm(slit_amplitude(x, Path::slit1, geometry)) +
        std::norm(slit_amplitude(x, Path::slit2, geometry));
    if (reference < 1e-12) continue;  // envelope zero: phase undefined
    const double value = pattern.density[i] / reference;
    if (best == pattern.x_grid.size() ||
        (maximum ? value > best_value : value < best_value)) {
      best = i;
      best_value = value;
    }
  }
  if (best == pattern.x_grid.size())
    throw contract_error("no usable grid points in the fringe window");
  return best;
}

/// File-name-safe form of a subset label: "+45" -> "plus45", "-45" ->
/// "minus45", others keep alphanumerics and map the rest to '_'.
std::string safe_label(const std::string& label) {
  std::string safe;
  for (char c : label) {
    if (c == '+')
      safe += "plus";
    else if (c == '-')
      safe += "minus";
    else if (std::isalnum(static_cast<unsigned char>(c)))
      safe += c;
    else
      safe += '_';
  }
  return safe;
}

void write_json(const std::filesystem::path& path, const Json& json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open for writing: " + path.string());
  out << json.dump(2) << '\n';
}

}  // namespace

TwoPhotonState build_state(const ExperimentConfig& config) {
  config.validate();
  TwoPhotonState state =
      split_through_double_slit(make_entangled_source(config.source));
  if (config.qwp_angles) {
    const SlitElementPair plates(qwp((*config.qwp_angles)[0]),
                                 qwp((*config.qwp_angles)[1]));
    state = mark_paths(state, plates);
  }
  return state;
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
  config.validate();
  const TwoPhotonState state = build_state(config);
  const ScreenGeometry& geometry = config.geometry;
  const std::vector<double> grid = default_grid(geometry);
  const FringeWindow window = central_window(geometry);

  RunArtifacts artifacts;
  artifacts.directory = config.output_dir;
  std::filesystem::create_directories(artifacts.directory);

  const auto emit_pattern = [&](const std::string& name,
                                const Pattern& pattern) {
    write_pattern_csv(artifacts.directory / name, pattern);
    artifacts.files.push_back(name);
  };

  const Pattern marginal =
      pattern_conditional(state, std::nullopt, geometry, grid);
  emit_pattern("pattern_marginal.csv", marginal);

  const double vis_marginal =
      fringe_visibility(marginal, geometry, window.lo, window.hi);
  const double dist = distinguishability(state);

  Json analytic;
  analytic["visibility_marginal"] = vis_marginal;
  analytic["distinguishability"] = dist;
  analytic["duality_sum"] = vis_marginal * vis_marginal + dist * dist;
  analytic["partition_residual_diagonal"] = partition_residual(
      state, PolarizationBasis::diagonal(), geometry, grid, marginal);
  analytic["partition_residual_hv"] = partition_residual(
      state, PolarizationBasis::hv(), geometry, grid, marginal);
  analytic["partition_residual_circular"] = partition_residual(
      state, PolarizationBasis::circular(), geometry, grid, marginal);

  switch (config.preset) {
    case Preset::young: {
      const auto condition = config.b_condition.value_or(
          std::make_pair(PolarizationBasis::hv(), Outcome::first));
      const Pattern coincident = pattern_conditional(
          state, b_spec(condition.first, condition.second), geometry, grid);
      emit_pattern("pattern_coincident.csv", coincident);
      analytic["visibility_coincident"] =
          fringe_visibility(coincident, geometry, window.lo, window.hi);
      break;
    }
    case Preset::marked: {
      const Pattern envelope = incoherent_reference(geometry, grid);
      emit_pattern("pattern_envelope.csv", envelope);
      // The normalized marginal is half the unit-illumination envelope:
      // each slit carries probability 1/2.
      double residual = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        residual = std::max(residual, std::abs(2.0 * marginal.density[i] -
                                               envelope.density[i]));
      analytic["envelope_residual"] = residual;
      break;
    }
    case Preset::eraser: {
      const Pattern plus = pattern_conditional(
          state, b_spec(PolarizationBasis::diagonal(), Outcome::first),
          geometry, grid);
      const Pattern minus = pattern_conditional(
          state, b_spec(PolarizationBasis::diagonal(), Outcome::second),
          geometry, grid);
      emit_pattern("pattern_plus45.csv", plus);
      emit_pattern("pattern_minus45.csv", minus);
      analytic["visibility_plus45"] =
          fringe_visibility(plus, geometry, window.lo, window.hi);
      analytic["visibility_minus45"] =
          fringe_visibility(minus, geometry, window.lo, window.hi);
      const std::size_t peak_plus = extremum_index(plus, geometry, window, true);
      const std::size_t dip_minus =
          extremum_index(minus, geometry, window, false);
      analytic["antifringe_offset_steps"] = static_cast<std::int64_t>(
          std::llabs(static_cast<long long>(peak_plus) -
                     static_cast<long long>(dip_minus)));
      analytic["eraser_sum_residual"] = partition_residual(
          state, PolarizationBasis::diagonal(), geometry, grid, marginal);
      break;
    }
    case Preset::delayed: {
      // Analytic reference patterns for every subset the schedule can tag.
      std::vector<std::pair<PolarizationBasis, Outcome>> seen;
      for (const PolarizationBasis& basis : config.sampler->schedule.bases) {
        for (Outcome which : {Outcome::first, Outcome::second}) {
          const bool duplicate =
              std::any_of(seen.begin(), seen.end(), [&](const auto& s) {
                return s.first == basis && s.second == which;
              });
          if (duplicate) continue;
          seen.emplace_back(basis, which);
          const SubsetSelector selector = SubsetSelector::of(basis, which);
          const Pattern conditional = pattern_conditional(
              state, b_spec(basis, which), geometry, grid);
          emit_pattern("pattern_" + safe_label(selector.label()) + ".csv",
                       conditional);
        }
      }
      break;
    }
  }

  Json sampled;
  if (config.sampler) {
    const SamplerConfig& sampler = *config.sampler;
    const std::uint64_t hash = config_hash(config);
    const SampleResult sample = sample_pairs(state, geometry, sampler, grid);
    write_events_csv(artifacts.directory / "events_a.csv", sample.events_a);
    write_events_csv(artifacts.directory / "events_b.csv", sample.events_b);
    artifacts.files.push_back("events_a.csv");
    artifacts.files.push_back("events_b.csv");

    const auto pairs = coincidences(sample.events_a, sample.events_b,
                                    sampler.coincidence_window);
    const Ledger ledger = build_ledger(pairs, sampler.rng_seed, hash);
    write_ledger_csv(artifacts.directory / "ledger.csv", ledger);
    artifacts.files.push_back("ledger.csv");

    sampled["pairs_emitted"] = sampler.pair_count;
    sampled["events_a"] = sample.events_a.size();
    sampled["events_b"] = sample.events_b.size();
    sampled["coincidences"] = pairs.size();
    sampled["expected_coincidences"] =
        static_cast<double>(sampler.pair_count) * sampler.efficiency_a *
        sampler.efficiency_b;
    sampled["rng_seed"] = sampler.rng_seed;
    sampled["config_hash"] = hex16(hash);

    Json counts = Json::object();
    const std::size_t bins = grid.size() - 1;
    std::vector<std::pair<PolarizationBasis, Outcome>> seen;
    for (const PolarizationBasis& basis : sampler.schedule.bases) {
      for (Outcome which : {Outcome::first, Outcome::second}) {
        const bool duplicate =
            std::any_of(seen.begin(), seen.end(), [&](const auto& s) {
              return s.first == basis && s.second == which;
            });
        if (duplicate) continue;
        seen.emplace_back(basis, which);
        const SubsetSelector selector = SubsetSelector::of(basis, which);
        std::uint64_t count = 0;
        for (const auto hits : sort_subsets(ledger, selector, bins))
          count += hits;
        counts[selector.label()] = count;
      }
    }
    sampled["subset_counts"] = std::move(counts);
  }

  Json report;
  report["schema_version"] = 1;
  report["preset"] = preset_label(config.preset);
  report["config_hash"] = hex16(config_hash(config));
  report["analytic"] = std::move(analytic);
  if (config.sampler) report["sampled"] = std::move(sampled);
  Json outputs = Json::array();
  for (const std::string& name : artifacts.files) outputs.push_back(name);
  report["outputs"] = std::move(outputs);

  write_json(artifacts.directory / "report.json", report);
  artifacts.files.push_back("report.json");
  artifacts.report = std::move(report);
  return artifacts;
}

nlohmann::ordered_json report_from_ledger(
    const std::filesystem::path& ledger_path, const ExperimentConfig& config,
    const std::vector<SubsetSelector>& selectors) {
  config.validate();
  if (!config.sampler)
    throw config_error(
        "report requires a sampled-mode config (the ledger's run)");

  const Ledger ledger = read_ledger_csv(ledger_path);
  const std::uint64_t expected_hash = config_hash(config);
  if (ledger.config_hash() != expected_hash)
    throw mismatch_error("ledger " + ledger_path.string() +
                         " was not produced by this config (hash " +
                         hex16(ledger.config_hash()) + " != " +
                         hex16(expected_hash) + ")");
  if (ledger.seed() != config.sampler->rng_seed)
    throw mismatch_error("ledger " + ledger_path.string() +
                         " seed does not match the config");

  const TwoPhotonState state = build_state(config);
  const ScreenGeometry& geometry = config.geometry;
  const std::vector<double> grid = default_grid(geometry);
  const std::size_t bins = grid.size() - 1;

  Json json;
  json["ledger"] = Json{{"path", ledger_path.string()},
                        {"seed", ledger.seed()},
                        {"config_hash", hex16(ledger.config_hash())},
                        {"records", ledger.records().size()},
                        {"bins", bins}};

  Json subsets = Json::array();
  for (const SubsetSelector& selector : selectors) {
    const auto histogram = sort_subsets(ledger, selector, bins);
    std::uint64_t count = 0;
    for (std::uint64_t hits : histogram) count += hits;

    Json entry;
    entry["selector"] = selector.label();
    entry["count"] = count;
    if (count > 0) {
      std::vector<double> values(histogram.begin(), histogram.end());
      entry["visibility"] = cell_fringe_visibility(values, grid, geometry);
    } else {
      entry["visibility"] = nullptr;
    }
    subsets.push_back(std::move(entry));
  }
  json["subsets"] = std::move(subsets);

  const DelayedComparison comparison = delayed_equals_prompt(
      ledger, state, geometry, *config.sampler, grid, expected_hash);
  Json verdicts = Json::array();
  for (const SubsetVerdict& verdict : comparison.subsets) {
    verdicts.push_back(Json{{"selector", verdict.selector},
                            {"count", verdict.count},
                            {"bit_exact", verdict.bit_exact},
                            {"max_abs_z", verdict.max_abs_z},
                            {"visibility", verdict.visibility},
                            {"visibility_floor", verdict.visibility_floor},
                            {"expects_fringes", verdict.expects_fringes},
                            {"pass", verdict.pass}});
  }
  json["delayed_equals_prompt"] =
      Json{{"subsets", std::move(verdicts)},
           {"full_max_abs_z", comparison.full_max_abs_z},
           {"pass", comparison.pass}};
  return json;
}

SweepMode parse_sweep_mode(const std::string& text) {
  if (text == "angle") return SweepMode::marking_angle;
  if (text == "retardance") return SweepMode::retardance;
  throw config_error("unknown sweep mode: '" + text +
                     "' (expected angle or retardance)");
}

std::vector<DualityPoint> duality_sweep(const ExperimentConfig& base,
                                        SweepMode mode,
                                        std::size_t point_count) {
  if (point_count < 2)
    throw config_error("sweep needs at least two points");
  base.geometry.validate();

  const TwoPhotonState unmarked =
      split_through_double_slit(make_entangled_source(base.source));
  const std::vector<double> grid = default_grid(base.geometry);
  const FringeWindow window = central_window(base.geometry);

  std::vector<DualityPoint> points;
  points.reserve(point_count);
  for (std::size_t k = 0; k < point_count; ++k) {
    const double t =
        static_cast<double>(k) / static_cast<double>(point_count - 1);
    DualityPoint point;
    TwoPhotonState marked = unmarked;
    if (mode == SweepMode::marking_angle) {
      point.parameter = t * kQuarter;
      marked = mark_paths(unmarked, SlitElementPair(qwp(point.parameter),
                                                    qwp(-point.parameter)));
    } else {
      point.parameter = t * (std::numbers::pi / 2.0);
      marked = mark_paths(
          unmarked, SlitElementPair(retarder(kQuarter, point.parameter),
                                    retarder(-kQuarter, point.parameter)));
    }
    const Pattern marginal =
        pattern_conditional(marked, std::nullopt, base.geometry, grid);
    point.visibility =
        fringe_visibility(marginal, base.geometry, window.lo, window.hi);
    point.distinguishability = distinguishability(marked);
    points.push_back(point);
  }
  return points;
}

std::string sweep_to_csv(const std::vector<DualityPoint>& points) {
  std::string csv = "parameter_rad,visibility,distinguishability,duality_sum\n";
  for (const DualityPoint& point : points) {
    const double sum = point.visibility * point.visibility +
                       point.distinguishability * point.distinguishability;
    csv += format_g17(point.parameter) + ',' + format_g17(point.visibility) +
           ',' + format_g17(point.distinguishability) + ',' + format_g17(sum) +
           '\n';
  }
  return csv;
}

}  // namespace qe

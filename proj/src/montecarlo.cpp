#include "qe/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "qe/rng.hpp"

namespace qe {

namespace {

/// Pairs per RNG shard. Each shard owns an independent generator seeded
/// with rng_seed XOR shard_index, so the event streams never depend on how
/// many shards execute concurrently.
constexpr std::uint64_t kShardSize = 8192;

constexpr double kJitterMaxSigmas = 4.0;

struct OutcomeTable {
  double p_first = 0.0;
  // Cumulative cell probabilities of photon a's conditional pattern, one
  // table per b outcome. Empty when the outcome itself has no probability.
  std::vector<double> cdf_first;
  std::vector<double> cdf_second;
};

std::vector<double> cumulative(const std::vector<double>& probabilities) {
  std::vector<double> cdf(probabilities.size());
  double running = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    running += probabilities[i];
    cdf[i] = running;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

OutcomeTable build_table(const TwoPhotonState& state,
                         const ScreenGeometry& geometry,
                         const PolarizationBasis& basis,
                         const std::vector<double>& x_grid) {
  OutcomeTable table;
  const double p1 = outcome_probability(
      state, ProjectorSpec{Photon::b, basis, Outcome::first});
  const double p2 = outcome_probability(
      state, ProjectorSpec{Photon::b, basis, Outcome::second});
  table.p_first = p1 / (p1 + p2);
  for (Outcome which : {Outcome::first, Outcome::second}) {
    const double p = which == Outcome::first ? p1 : p2;
    if (p < kProbabilityFloor) continue;
    const Pattern pattern = pattern_conditional(
        state, ProjectorSpec{Photon::b, basis, which}, geometry, x_grid);
    auto& cdf =
        which == Outcome::first ? table.cdf_first : table.cdf_second;
    cdf = cumulative(cell_probabilities(pattern));
  }
  return table;
}

int draw_cell(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1));
}

struct ShardOutput {
  std::vector<DetectionEvent> events_a;
  std::vector<DetectionEvent> events_b;
};

/// Generates pairs [first_pair, last_pair). The per-pair draw order is
/// frozen (inter-arrival, b outcome, a cell, jitter a, jitter b, keep a,
/// keep b) so that identical configurations replay identical streams.
ShardOutput run_shard(std::uint64_t shard, std::uint64_t first_pair,
                      std::uint64_t last_pair, const SamplerConfig& config,
                      const std::vector<OutcomeTable>& tables) {
  ShardOutput out;
  Xoshiro256pp rng(config.rng_seed ^ shard);
  double clock = static_cast<double>(shard) *
                 (static_cast<double>(kShardSize) / config.pair_rate);

  for (std::uint64_t k = first_pair; k < last_pair; ++k) {
    clock += rng.exponential(config.pair_rate);

    const std::uint64_t schedule_slot =
        (k / config.schedule.block_length) % config.schedule.bases.size();
    const OutcomeTable& table = tables[schedule_slot];

    const double u_outcome = rng.uniform01();
    const bool first = u_outcome < table.p_first;
    const auto& cdf = first ? table.cdf_first : table.cdf_second;

    const double u_cell = rng.uniform01();
    const int cell = draw_cell(cdf, u_cell);

    const double jitter_a =
        rng.gaussian_truncated(config.jitter_sigma, kJitterMaxSigmas);
    const double jitter_b =
        rng.gaussian_truncated(config.jitter_sigma, kJitterMaxSigmas);
    const bool keep_a = rng.uniform01() < config.efficiency_a;
    const bool keep_b = rng.uniform01() < config.efficiency_b;

    if (keep_a) {
      out.events_a.push_back(DetectionEvent{clock + jitter_a,
                                            DetectorId::screen_a, cell,
                                            std::nullopt});
    }
    if (keep_b) {
      out.events_b.push_back(
          DetectionEvent{clock + jitter_b, DetectorId::pol_b, first ? 0 : 1,
                         config.schedule.bases[schedule_slot]});
    }
  }
  return out;
}

void check_sorted(const std::vector<DetectionEvent>& events,
                  const char* which) {
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i].timestamp < events[i - 1].timestamp)
      throw contract_error(std::string("coincidences: stream ") + which +
                           " is not time-sorted");
}

}  // namespace

const PolarizationBasis& BasisSchedule::at(std::uint64_t pair_index) const {
  if (bases.empty()) throw contract_error("basis schedule is empty");
  return bases[(pair_index / block_length) % bases.size()];
}

void SamplerConfig::validate() const {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(pair_rate)) throw config_error("pair_rate must be positive");
  if (!positive(coincidence_window))
    throw config_error("coincidence_window must be positive");
  for (double eff : {efficiency_a, efficiency_b})
    if (!std::isfinite(eff) || eff < 0.0 || eff > 1.0)
      throw config_error("efficiencies must lie in [0, 1]");
  if (!std::isfinite(jitter_sigma) || jitter_sigma < 0.0)
    throw config_error("jitter_sigma must be non-negative");
  if (schedule.bases.empty())
    throw config_error("b basis schedule must list at least one basis");
  if (schedule.block_length == 0)
    throw config_error("schedule block_length must be at least 1");
}

std::vector<double> cell_probabilities(const Pattern& pattern) {
  if (pattern.x_grid.size() < 2)
    throw contract_error("pattern grid must have at least two points");
  std::vector<double> mass(pattern.x_grid.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pattern.x_grid.size(); ++i) {
    mass[i] = 0.5 * (pattern.density[i] + pattern.density[i + 1]) *
              (pattern.x_grid[i + 1] - pattern.x_grid[i]);
    total += mass[i];
  }
  if (total < kProbabilityFloor)
    throw contract_error("pattern carries no probability mass on the grid");
  for (double& m : mass) m /= total;
  return mass;
}

SampleResult sample_pairs(const TwoPhotonState& state,
                          const ScreenGeometry& geometry,
                          const SamplerConfig& config,
                          const std::vector<double>& x_grid,
                          unsigned worker_hint) {
  geometry.validate();
  config.validate();
  if (!std::is_sorted(x_grid.begin(), x_grid.end()))
    throw contract_error("sampler grid must be ascending");

  std::vector<OutcomeTable> tables;
  tables.reserve(config.schedule.bases.size());
  for (const PolarizationBasis& basis : config.schedule.bases)
    tables.push_back(build_table(state, geometry, basis, x_grid));

  const std::uint64_t shard_count =
      (config.pair_count + kShardSize - 1) / kShardSize;
  std::vector<ShardOutput> shards(shard_count);

  unsigned workers = worker_hint != 0 ? worker_hint
                                      : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(std::max<std::uint64_t>(
      1, std::min<std::uint64_t>(workers, shard_count)));

  std::atomic<std::uint64_t> next_shard{0};
  const auto drain = [&]() {
    for (;;) {
      const std::uint64_t shard = next_shard.fetch_add(1);
      if (shard >= shard_count) return;
      const std::uint64_t first = shard * kShardSize;
      const std::uint64_t last =
          std::min(first + kShardSize, config.pair_count);
      shards[shard] = run_shard(shard, first, last, config, tables);
    }
  };

  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
  }

  SampleResult result;
  for (ShardOutput& shard : shards) {
    result.events_a.insert(result.events_a.end(), shard.events_a.begin(),
                           shard.events_a.end());
    result.events_b.insert(result.events_b.end(), shard.events_b.begin(),
                           shard.events_b.end());
  }
  const auto by_time = [](const DetectionEvent& l, const DetectionEvent& r) {
    return l.timestamp < r.timestamp;
  };
  std::stable_sort(result.events_a.begin(), result.events_a.end(), by_time);
  std::stable_sort(result.events_b.begin(), result.events_b.end(), by_time);
  return result;
}

std::vector<std::pair<DetectionEvent, DetectionEvent>> coincidences(
    const std::vector<DetectionEvent>& events_a,
    const std::vector<DetectionEvent>& events_b, double window) {
  if (!(window > 0.0) || !std::isfinite(window))
    throw contract_error("coincidence window must be positive");
  check_sorted(events_a, "a");
  check_sorted(events_b, "b");

  std::vector<std::pair<DetectionEvent, DetectionEvent>> pairs;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < events_a.size() && j < events_b.size()) {
    const double dt = events_a[i].timestamp - events_b[j].timestamp;
    if (std::abs(dt) <= window) {
      pairs.emplace_back(events_a[i], events_b[j]);
      ++i;
      ++j;
    } else if (dt < 0.0) {
      ++i;
    } else {
      ++j;
    }
  }
  return pairs;
}

}  // namespace qe

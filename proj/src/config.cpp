#include "qe/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "qe/csvio.hpp"

namespace qe {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw config_error("config field '" + path + "': " + what);
}

void require_keys(const Json& object, const std::string& path,
                  const std::set<std::string>& allowed) {
  for (const auto& [key, value] : object.items())
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key,
                                  "unknown field");
}

const Json& require(const Json& object, const std::string& path,
                    const std::string& key) {
  const auto it = object.find(key);
  if (it == object.end())
    fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double as_number(const Json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected a number");
  return value.get<double>();
}

std::uint64_t as_u64(const Json& value, const std::string& path) {
  if (!value.is_number_unsigned()) fail(path, "expected an unsigned integer");
  return value.get<std::uint64_t>();
}

std::string as_string(const Json& value, const std::string& path) {
  if (!value.is_string()) fail(path, "expected a string");
  return value.get<std::string>();
}

PolarizationBasis as_basis(const Json& value, const std::string& path) {
  try {
    return PolarizationBasis::parse(as_string(value, path));
  } catch (const config_error& err) {
    fail(path, err.what());
  }
}

Json schedule_to_json(const BasisSchedule& schedule) {
  Json bases = Json::array();
  for (const PolarizationBasis& basis : schedule.bases)
    bases.push_back(basis.label());
  return Json{{"bases", std::move(bases)},
              {"block_length", schedule.block_length}};
}

BasisSchedule schedule_from_json(const Json& json, const std::string& path) {
  if (!json.is_object()) fail(path, "expected an object");
  require_keys(json, path, {"bases", "block_length"});
  BasisSchedule schedule;
  const Json& bases = require(json, path, "bases");
  if (!bases.is_array() || bases.empty())
    fail(path + ".bases", "expected a non-empty array of basis labels");
  schedule.bases.clear();
  for (std::size_t i = 0; i < bases.size(); ++i)
    schedule.bases.push_back(
        as_basis(bases[i], path + ".bases[" + std::to_string(i) + "]"));
  schedule.block_length = as_u64(require(json, path, "block_length"),
                                 path + ".block_length");
  return schedule;
}

}  // namespace

std::string preset_label(Preset preset) {
  switch (preset) {
    case Preset::young:
      return "young";
    case Preset::marked:
      return "marked";
    case Preset::eraser:
      return "eraser";
    case Preset::delayed:
      return "delayed";
  }
  throw contract_error("unknown preset");
}

Preset parse_preset(const std::string& text) {
  if (text == "young") return Preset::young;
  if (text == "marked") return Preset::marked;
  if (text == "eraser") return Preset::eraser;
  if (text == "delayed") return Preset::delayed;
  throw config_error("unknown preset: '" + text +
                     "' (expected young, marked, eraser, or delayed)");
}

void ExperimentConfig::validate() const {
  if (schema_version != 1)
    throw config_error("config field 'schema_version': unsupported version " +
                       std::to_string(schema_version));
  geometry.validate();

  const bool wants_plates = preset != Preset::young;
  if (wants_plates && !qwp_angles)
    throw config_error("config field 'qwp_angles_rad': required by preset " +
                       preset_label(preset));
  if (!wants_plates && qwp_angles)
    throw config_error(
        "config field 'qwp_angles_rad': forbidden by preset young");
  if (qwp_angles)
    for (double angle : *qwp_angles)
      if (!std::isfinite(angle))
        throw config_error("config field 'qwp_angles_rad': must be finite");

  if (b_condition && preset != Preset::young)
    throw config_error(
        "config field 'b_condition': only the young preset takes an explicit "
        "condition; eraser and delayed fix their own analyzers");

  if (preset == Preset::delayed && !sampler)
    throw config_error(
        "config field 'sampler': required by preset delayed");
  if (sampler) sampler->validate();

  if (output_dir.empty())
    throw config_error("config field 'output_dir': must not be empty");
}

ExperimentConfig default_config(Preset preset) {
  constexpr double kQuarter = std::numbers::pi / 4.0;
  ExperimentConfig config;
  config.preset = preset;
  switch (preset) {
    case Preset::young:
      config.b_condition = {PolarizationBasis::hv(), Outcome::first};
      break;
    case Preset::marked:
    case Preset::eraser:
      config.qwp_angles = {kQuarter, -kQuarter};
      break;
    case Preset::delayed: {
      config.qwp_angles = {kQuarter, -kQuarter};
      SamplerConfig sampler;
      sampler.pair_count = 100000;
      sampler.rng_seed = 42;
      sampler.schedule.bases = {PolarizationBasis::hv(),
                                PolarizationBasis::diagonal()};
      sampler.schedule.block_length = 1;
      config.sampler = sampler;
      break;
    }
  }
  config.output_dir = "out";
  return config;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& config) {
  Json json;
  json["schema_version"] = config.schema_version;
  json["preset"] = preset_label(config.preset);
  json["source"] =
      config.source == PhaseConvention::singlet ? "singlet" : "triplet";
  json["geometry"] = Json{{"slit_width_m", config.geometry.slit_width},
                          {"slit_separation_m", config.geometry.slit_separation},
                          {"screen_distance_m", config.geometry.screen_distance},
                          {"wavelength_m", config.geometry.wavelength}};
  if (config.qwp_angles)
    json["qwp_angles_rad"] =
        Json::array({(*config.qwp_angles)[0], (*config.qwp_angles)[1]});
  if (config.b_condition)
    json["b_condition"] = Json{{"basis", config.b_condition->first.label()},
                               {"outcome",
                                outcome_label(config.b_condition->second)}};
  if (config.sampler) {
    const SamplerConfig& s = *config.sampler;
    json["sampler"] = Json{{"pair_count", s.pair_count},
                           {"pair_rate_hz", s.pair_rate},
                           {"coincidence_window_s", s.coincidence_window},
                           {"b_basis_schedule", schedule_to_json(s.schedule)},
                           {"rng_seed", s.rng_seed},
                           {"efficiency_a", s.efficiency_a},
                           {"efficiency_b", s.efficiency_b},
                           {"jitter_sigma_s", s.jitter_sigma}};
  }
  json["output_dir"] = config.output_dir;
  return json;
}

ExperimentConfig config_from_json(const nlohmann::ordered_json& json) {
  if (!json.is_object()) throw config_error("config root must be an object");
  require_keys(json, "",
               {"schema_version", "preset", "source", "geometry",
                "qwp_angles_rad", "b_condition", "sampler", "output_dir"});

  ExperimentConfig config;
  const Json& version = require(json, "", "schema_version");
  if (!version.is_number_integer()) fail("schema_version", "expected an integer");
  config.schema_version = version.get<int>();

  config.preset = parse_preset(as_string(require(json, "", "preset"), "preset"));

  const std::string source = as_string(require(json, "", "source"), "source");
  if (source == "singlet")
    config.source = PhaseConvention::singlet;
  else if (source == "triplet")
    config.source = PhaseConvention::triplet;
  else
    fail("source", "expected 'singlet' or 'triplet'");

  const Json& geometry = require(json, "", "geometry");
  if (!geometry.is_object()) fail("geometry", "expected an object");
  require_keys(geometry, "geometry",
               {"slit_width_m", "slit_separation_m", "screen_distance_m",
                "wavelength_m"});
  config.geometry.slit_width = as_number(
      require(geometry, "geometry", "slit_width_m"), "geometry.slit_width_m");
  config.geometry.slit_separation =
      as_number(require(geometry, "geometry", "slit_separation_m"),
                "geometry.slit_separation_m");
  config.geometry.screen_distance =
      as_number(require(geometry, "geometry", "screen_distance_m"),
                "geometry.screen_distance_m");
  config.geometry.wavelength = as_number(
      require(geometry, "geometry", "wavelength_m"), "geometry.wavelength_m");

  if (json.contains("qwp_angles_rad")) {
    const Json& angles = json["qwp_angles_rad"];
    if (!angles.is_array() || angles.size() != 2)
      fail("qwp_angles_rad", "expected an array of two angles");
    config.qwp_angles = {as_number(angles[0], "qwp_angles_rad[0]"),
                         as_number(angles[1], "qwp_angles_rad[1]")};
  }

  if (json.contains("b_condition")) {
    const Json& condition = json["b_condition"];
    if (!condition.is_object()) fail("b_condition", "expected an object");
    require_keys(condition, "b_condition", {"basis", "outcome"});
    PolarizationBasis basis = as_basis(require(condition, "b_condition", "basis"),
                                       "b_condition.basis");
    Outcome outcome = Outcome::first;
    try {
      outcome = parse_outcome(
          as_string(require(condition, "b_condition", "outcome"),
                    "b_condition.outcome"));
    } catch (const config_error& err) {
      fail("b_condition.outcome", err.what());
    }
    config.b_condition = {basis, outcome};
  }

  if (json.contains("sampler")) {
    const Json& sampler = json["sampler"];
    if (!sampler.is_object()) fail("sampler", "expected an object");
    require_keys(sampler, "sampler",
                 {"pair_count", "pair_rate_hz", "coincidence_window_s",
                  "b_basis_schedule", "rng_seed", "efficiency_a",
                  "efficiency_b", "jitter_sigma_s"});
    SamplerConfig s;
    s.pair_count =
        as_u64(require(sampler, "sampler", "pair_count"), "sampler.pair_count");
    s.pair_rate = as_number(require(sampler, "sampler", "pair_rate_hz"),
                            "sampler.pair_rate_hz");
    s.coincidence_window =
        as_number(require(sampler, "sampler", "coincidence_window_s"),
                  "sampler.coincidence_window_s");
    s.schedule = schedule_from_json(
        require(sampler, "sampler", "b_basis_schedule"),
        "sampler.b_basis_schedule");
    s.rng_seed =
        as_u64(require(sampler, "sampler", "rng_seed"), "sampler.rng_seed");
    s.efficiency_a = as_number(require(sampler, "sampler", "efficiency_a"),
                               "sampler.efficiency_a");
    s.efficiency_b = as_number(require(sampler, "sampler", "efficiency_b"),
                               "sampler.efficiency_b");
    s.jitter_sigma = as_number(require(sampler, "sampler", "jitter_sigma_s"),
                               "sampler.jitter_sigma_s");
    config.sampler = s;
  }

  config.output_dir =
      as_string(require(json, "", "output_dir"), "output_dir");

  config.validate();
  return config;
}

void save_config(const std::filesystem::path& path,
                 const ExperimentConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open for writing: " + path.string());
  out << config_to_json(config).dump(2) << '\n';
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config: " + path.string());
  Json json;
  try {
    json = Json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw config_error("config parse error in " + path.string() + ": " +
                       err.what());
  }
  return config_from_json(json);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  Json json = config_to_json(config);
  json.erase("output_dir");
  return fnv1a64(json.dump());
}

}  // namespace qe

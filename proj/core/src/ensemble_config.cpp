#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "wxr/ensemble.hpp"
#include "wxr/error.hpp"

namespace wxr {

using nlohmann::json;

namespace {

constexpr double kCanonicalLevels[] = {0.0, 0.02, 0.05, 0.10, 0.20, 0.35, 0.50};

bool is_canonical(double v) {
  return std::any_of(std::begin(kCanonicalLevels), std::end(kCanonicalLevels),
                     [v](double c) { return std::abs(v - c) <= 1e-12; });
}

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::BadConfig, "bad config: " + what); }

json region_to_json(const Region& r) {
  return {{"lat_min", r.lat_min}, {"lat_max", r.lat_max}, {"lon_min", r.lon_min}, {"lon_max", r.lon_max}};
}

Region region_from_json(const json& j, const std::string& key) {
  try {
    if (j.is_array()) {
      if (j.size() != 4) bad(key + " must be [lat_min, lat_max, lon_min, lon_max]");
      return Region::make(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
    }
    return Region::make(j.at("lat_min").get<double>(), j.at("lat_max").get<double>(), j.at("lon_min").get<double>(),
                        j.at("lon_max").get<double>());
  } catch (const json::exception& e) {
    bad(key + ": " + e.what());
  } catch (const Error& e) {
    bad(key + ": " + e.what());
  }
}

json distribution_to_json(const BaseDistribution& d) {
  json j = {{"kind", std::string(to_string(d.kind))}};
  if (d.kind == Distribution::Chi2) j["dof"] = d.chi2_dof;
  if (d.kind == Distribution::Lognormal) j["sigma"] = d.lognormal_sigma;
  return j;
}

BaseDistribution distribution_from_json(const json& j) {
  BaseDistribution d;
  try {
    if (j.is_string()) {
      d.kind = parse_distribution(j.get<std::string>());
    } else {
      d.kind = parse_distribution(j.at("kind").get<std::string>());
      d.chi2_dof = j.value("dof", d.chi2_dof);
      d.lognormal_sigma = j.value("sigma", d.lognormal_sigma);
    }
    d.validate();
  } catch (const json::exception& e) {
    bad(std::string("distributions: ") + e.what());
  } catch (const Error& e) {
    bad(std::string("distributions: ") + e.what());
  }
  return d;
}

json backend_to_json(const BackendDescriptor& b) {
  if (b.kind == BackendDescriptor::Kind::Surrogate) {
    return {{"kind", "surrogate"},
            {"advect_cells_lon", b.surrogate.advect_cells_lon},
            {"relax_rate", b.surrogate.relax_rate}};
  }
  return {{"kind", "external"},
          {"command", b.external.command},
          {"work_dir", b.external.work_dir.string()},
          {"timeout_s", b.external.timeout.count()},
          {"keep_exchange", b.external.keep_exchange}};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

BackendDescriptor backend_from_json(const json& j, const std::filesystem::path& base) {
  BackendDescriptor b;
  const std::string kind = j.value("kind", std::string("surrogate"));
  if (kind == "surrogate") {
    b.kind = BackendDescriptor::Kind::Surrogate;
    b.surrogate.advect_cells_lon = j.value("advect_cells_lon", 0);
    b.surrogate.relax_rate = j.value("relax_rate", 0.0);
  } else if (kind == "external") {
    b.kind = BackendDescriptor::Kind::External;
    b.external.command = j.value("command", std::string());
    if (j.contains("work_dir")) b.external.work_dir = resolve(base, j.at("work_dir").get<std::string>());
    b.external.timeout = std::chrono::seconds(j.value("timeout_s", std::int64_t{3600}));
    b.external.keep_exchange = j.value("keep_exchange", false);
  } else {
    bad("unknown backend kind '" + kind + "'");
  }
  return b;
}

}  // namespace

std::span<const double> canonical_levels() noexcept { return kCanonicalLevels; }

std::vector<NoiseLevel> default_noise_levels() {
  std::vector<NoiseLevel> out;
  for (double b : kCanonicalLevels) out.push_back({b, 0.0, +1});
  return out;
}

void validate_noise_levels(std::span<const NoiseLevel> levels, LevelMode mode) {
  if (levels.empty()) bad("no noise levels");
  for (const auto& l : levels) {
    for (double v : {l.beta, l.alpha}) {
      if (!(v >= 0.0 && v <= 1.0)) bad("noise level " + std::to_string(v) + " outside [0, 1]");
      if (mode == LevelMode::Default && !is_canonical(v)) {
        bad("noise level " + std::to_string(v) +
            " is not in the default set {0, 0.02, 0.05, 0.10, 0.20, 0.35, 0.50}; use explicit level mode");
      }
    }
    if (l.alpha_sign != 1 && l.alpha_sign != -1) bad("alpha_sign must be +1 or -1");
  }
}

void ExperimentConfig::validate() const {
  if (truth_paths.size() < 2) bad("need at least two truth snapshots (initial condition plus one step)");
  if (trials < 1) bad("trials must be at least 1");
  if (workers < 1) bad("workers must be at least 1");
  if (kind == ExperimentKind::Noise) {
    validate_noise_levels(levels, level_mode);
  } else {
    if (distributions.empty()) bad("random_ic experiments need at least one distribution");
    for (const auto& d : distributions) {
      try {
        d.validate();
      } catch (const Error& e) {
        bad(e.what());
      }
    }
  }
  if (hist_ranges.empty()) bad("hist_ranges must not be empty");
  for (double r : hist_ranges) {
    if (!(r > 0.0) || !std::isfinite(r)) bad("hist_ranges must be positive");
  }
  if (!catalog().find(variable)) bad("unknown variable '" + variable + "'");
  if (!regional_mask && !global_summaries) bad("enable regional_mask or global_summaries");
  try {
    backend.validate();
    track.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = cfg.kind == ExperimentKind::Noise ? "noise" : "random_ic";
  j["truth"] = json::array();
  for (const auto& p : cfg.truth_paths) j["truth"].push_back(p.string());
  j["levels"] = json::array();
  for (const auto& l : cfg.levels) j["levels"].push_back({{"beta", l.beta}, {"alpha", l.alpha}, {"alpha_sign", l.alpha_sign}});
  j["level_mode"] = cfg.level_mode == LevelMode::Default ? "default" : "explicit";
  j["distributions"] = json::array();
  for (const auto& d : cfg.distributions) j["distributions"].push_back(distribution_to_json(d));
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["backend"] = backend_to_json(cfg.backend);
  j["clamp"] = cfg.clamp;
  j["track"] = {{"region", region_to_json(cfg.track.region)}};
  j["track"]["continuity_radius_km"] =
      cfg.track.continuity_radius_km ? json(*cfg.track.continuity_radius_km) : json(nullptr);
  j["variable"] = cfg.variable;
  j["regional_mask"] = cfg.regional_mask ? region_to_json(*cfg.regional_mask) : json(nullptr);
  j["global_summaries"] = cfg.global_summaries;
  j["hist_ranges"] = cfg.hist_ranges;
  j["output_dir"] = cfg.output_dir.string();
  j["workers"] = cfg.workers;
  j["keep_states"] = cfg.keep_states;
  return j.dump(2);
}

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  static const std::set<std::string> known = {
      "kind",   "truth",       "truth_dir",  "levels",        "level_mode",       "distributions",
      "trials", "base_seed",   "backend",    "clamp",         "track",            "variable",
      "regional_mask", "global_summaries", "hist_ranges", "output_dir", "workers", "keep_states"};

  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) bad("unknown key '" + key + "'");
  }

  ExperimentConfig cfg;
  try {
    const std::string kind = j.value("kind", std::string("noise"));
    if (kind == "noise") {
      cfg.kind = ExperimentKind::Noise;
    } else if (kind == "random_ic") {
      cfg.kind = ExperimentKind::RandomIC;
    } else {
      bad("unknown kind '" + kind + "'");
    }

    if (j.contains("truth")) {
      for (const auto& p : j.at("truth")) cfg.truth_paths.push_back(resolve(base_dir, p.get<std::string>()));
    }
    if (j.contains("truth_dir")) {
      const auto dir = resolve(base_dir, j.at("truth_dir").get<std::string>());
      std::vector<std::filesystem::path> found;
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".wxs") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      cfg.truth_paths.insert(cfg.truth_paths.end(), found.begin(), found.end());
    }

    if (j.contains("levels")) {
      cfg.levels.clear();
      for (const auto& l : j.at("levels")) {
        if (l.is_number()) {
          cfg.levels.push_back({l.get<double>(), 0.0, +1});
        } else {
          cfg.levels.push_back({l.value("beta", 0.0), l.value("alpha", 0.0), l.value("alpha_sign", 1)});
        }
      }
    }
    const std::string mode = j.value("level_mode", std::string("default"));
    if (mode == "default") {
      cfg.level_mode = LevelMode::Default;
    } else if (mode == "explicit") {
      cfg.level_mode = LevelMode::Explicit;
    } else {
      bad("level_mode must be 'default' or 'explicit'");
    }

    if (j.contains("distributions")) {
      for (const auto& d : j.at("distributions")) cfg.distributions.push_back(distribution_from_json(d));
    }
    cfg.trials = j.value("trials", cfg.trials);
    cfg.base_seed = j.value("base_seed", cfg.base_seed);
    if (j.contains("backend")) cfg.backend = backend_from_json(j.at("backend"), base_dir);
    cfg.clamp = j.value("clamp", cfg.clamp);
    if (j.contains("track")) {
      const auto& t = j.at("track");
      if (t.contains("region")) cfg.track.region = region_from_json(t.at("region"), "track.region");
      if (t.contains("continuity_radius_km") && !t.at("continuity_radius_km").is_null()) {
        cfg.track.continuity_radius_km = t.at("continuity_radius_km").get<double>();
      }
    }
    cfg.variable = j.value("variable", cfg.variable);
    if (j.contains("regional_mask")) {
      const auto& m = j.at("regional_mask");
      cfg.regional_mask = m.is_null() ? std::nullopt : std::optional<Region>(region_from_json(m, "regional_mask"));
    }
    cfg.global_summaries = j.value("global_summaries", cfg.global_summaries);
    if (j.contains("hist_ranges")) cfg.hist_ranges = j.at("hist_ranges").get<std::vector<double>>();
    if (j.contains("output_dir")) cfg.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    cfg.workers = j.value("workers", cfg.workers);
    cfg.keep_states = j.value("keep_states", cfg.keep_states);
  } catch (const json::exception& e) {
    bad(e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    bad(e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str(), path.parent_path());
}

}  // namespace wxr

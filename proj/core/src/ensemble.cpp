#include "wxr/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unordered_set>

#include "wxr/error.hpp"
#include "wxr/error_stats.hpp"
#include "wxr/rng.hpp"
#include "wxr/state_io.hpp"
#include "wxr/worker_pool.hpp"

namespace wxr {

using nlohmann::json;

std::string_view to_string(TrialStatus s) noexcept {
  switch (s) {
    case TrialStatus::Ok: return "ok";
    case TrialStatus::Diverged: return "diverged";
    case TrialStatus::Failed: return "failed";
  }
  return "?";
}

namespace {

TrialStatus parse_status(const std::string& s) {
  if (s == "ok") return TrialStatus::Ok;
  if (s == "diverged") return TrialStatus::Diverged;
  if (s == "failed") return TrialStatus::Failed;
  throw Error(Errc::BadConfig, "unknown trial status '" + s + "'");
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

std::string trial_dir_name(std::size_t level, std::size_t trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "L%02zu_T%03zu", level, trial);
  return buf;
}

std::string range_tag(double r) {
  std::string s = format_double(r);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

struct Inputs {
  std::vector<FieldSet> truth;
  VariableStats stats;
};

Inputs load_inputs(const ExperimentConfig& cfg) {
  Inputs in;
  in.truth.reserve(cfg.truth_paths.size());
  for (const auto& p : cfg.truth_paths) in.truth.push_back(read_state(p));
  for (std::size_t k = 1; k < in.truth.size(); ++k) {
    if (!(in.truth[k].grid() == in.truth[0].grid())) {
      throw Error(Errc::IncompatibleFieldsets, "truth snapshot " + cfg.truth_paths[k].string() + " has a different grid");
    }
    if (in.truth[k].valid_time() != in.truth[k - 1].valid_time() + kModelTimestep) {
      throw Error(Errc::BadConfig, "bad config: truth snapshots must be consecutive 6-hour steps (" +
                                       cfg.truth_paths[k].string() + ")");
    }
  }
  in.stats = compute_stats(in.truth.front());
  return in;
}

BackendDescriptor trial_backend(const ExperimentConfig& cfg, const std::string& trial_name) {
  BackendDescriptor b = cfg.backend;
  if (b.kind == BackendDescriptor::Kind::External) {
    const auto root = b.external.work_dir.empty() ? cfg.output_dir / "exchange" : b.external.work_dir;
    b.external.work_dir = root / trial_name;
  }
  return b;
}

// Rolls out `ic`; on failure fills in status and message and returns nullopt.
std::optional<ForecastRun> try_rollout(const ExperimentConfig& cfg, const Inputs& in, const FieldSet& ic,
                                       const std::string& trial_name, TrialRecord& r) {
  try {
    auto backend = make_backend(trial_backend(cfg, trial_name), in.stats);
    return rollout(*backend, ic, in.truth.size() - 1, {cfg.clamp});
  } catch (const RolloutError& e) {
    r.status = e.code() == Errc::BackendNonFinite ? TrialStatus::Diverged : TrialStatus::Failed;
    r.message = e.what();
  } catch (const Error& e) {
    r.status = e.code() == Errc::NonFinite ? TrialStatus::Diverged : TrialStatus::Failed;
    r.message = e.what();
  }
  return std::nullopt;
}

void write_summaries(const ExperimentConfig& cfg, const Inputs& in, const ForecastRun& run,
                     const std::filesystem::path& dir, const std::string& rel, const std::string& scope,
                     const std::optional<Region>& mask, TrialRecord& r, bool record_std) {
  const auto series = series_over_time(run, in.truth, cfg.variable, mask, cfg.hist_ranges.front());

  std::string csv = "level_index,trial,seed,timestep," + std::string(summary_csv_columns()) + "\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    csv += std::to_string(r.level_index) + "," + std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
           std::to_string(k) + "," + summary_csv_row(series[k]) + "\n";
  }
  const std::string name = "summary_" + scope + ".csv";
  write_text(dir / name, csv);
  r.artifacts.push_back(rel + "/" + name);

  const std::size_t last = series.size() - 1;
  for (std::size_t k : {std::size_t{0}, last}) {
    const auto e = error_field(run.states[k], in.truth[k], cfg.variable, mask, k);
    for (double range : cfg.hist_ranges) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "hist_%s_step%02zu_r%s.csv", scope.c_str(), k, range_tag(range).c_str());
      write_text(dir / buf, histogram_to_csv(make_histogram(e.values, range)));
      r.artifacts.push_back(rel + "/" + buf);
    }
  }
  if (record_std) {
    r.initial_error_std = series.front().std;
    r.final_error_std = series.back().std;
  }
}

void persist_states(const ForecastRun& run, const std::filesystem::path& dir, const std::string& rel,
                    TrialRecord& r) {
  std::filesystem::create_directories(dir / "states");
  for (std::size_t k = 0; k < run.states.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "state_%03zu.wxs", k);
    write_state(dir / "states" / buf, run.states[k]);
    r.artifacts.push_back(rel + "/states/" + buf);
  }
}

TrialRecord run_noise_trial(const ExperimentConfig& cfg, const Inputs& in, const Trajectory& truth_track,
                            std::size_t level, std::size_t trial, std::uint64_t seed) {
  TrialRecord r;
  r.level_index = level;
  r.trial = trial;
  r.seed = seed;
  const std::string name = trial_dir_name(level, trial);
  const std::string rel = "trials/" + name;
  const auto dir = cfg.output_dir / rel;
  std::filesystem::create_directories(dir);

  const NoiseLevel& nl = cfg.levels[level];
  std::optional<ForecastRun> run;
  try {
    const FieldSet ic = inject_noise(in.truth.front(), in.stats, {nl.alpha, nl.alpha_sign, nl.beta, seed});
    run = try_rollout(cfg, in, ic, name, r);
  } catch (const Error& e) {
    r.status = e.code() == Errc::NonFinite ? TrialStatus::Diverged : TrialStatus::Failed;
    r.message = e.what();
  }
  if (!run) return r;

  try {
    const Trajectory track = track_storm(*run, cfg.track);
    r.mte_km = mean_trajectory_error(track, truth_track);
    write_text(dir / "trajectory.csv", trajectory_to_csv(track));
    r.artifacts.push_back(rel + "/trajectory.csv");

    if (cfg.regional_mask) write_summaries(cfg, in, *run, dir, rel, "regional", cfg.regional_mask, r, false);
    if (cfg.global_summaries) write_summaries(cfg, in, *run, dir, rel, "global", std::nullopt, r, true);
    if (cfg.keep_states) persist_states(*run, dir, rel, r);
  } catch (const Error& e) {
    r.status = TrialStatus::Failed;
    r.mte_km.reset();
    r.message = e.what();
  }
  return r;
}

TrialRecord run_random_trial(const ExperimentConfig& cfg, const Inputs& in, std::size_t dist_index,
                             std::size_t trial, std::uint64_t seed) {
  TrialRecord r;
  r.level_index = dist_index;
  r.trial = trial;
  r.seed = seed;
  const std::string name = trial_dir_name(dist_index, trial);
  const std::string rel = "trials/" + name;
  const auto dir = cfg.output_dir / rel;
  std::filesystem::create_directories(dir);

  std::optional<ForecastRun> run;
  try {
    const RandomICSpec spec{cfg.distributions[dist_index], seed, in.stats};
    const FieldSet ic = random_ic(in.truth.front().grid(), in.truth.front().valid_time(), spec);
    run = try_rollout(cfg, in, ic, name, r);
  } catch (const Error& e) {
    r.status = e.code() == Errc::NonFinite ? TrialStatus::Diverged : TrialStatus::Failed;
    r.message = e.what();
  }
  if (!run) return r;

  try {
    write_summaries(cfg, in, *run, dir, rel, "global", std::nullopt, r, true);
    if (cfg.keep_states) persist_states(*run, dir, rel, r);
  } catch (const Error& e) {
    r.status = TrialStatus::Failed;
    r.message = e.what();
  }
  return r;
}

std::vector<std::uint64_t> trial_seeds(const ExperimentConfig& cfg, std::size_t groups) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(groups * cfg.trials);
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t l = 0; l < groups; ++l) {
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const auto s = derive_trial_seed(cfg.base_seed, l, t);
      if (!seen.insert(s).second) throw Error(Errc::BadConfig, "bad config: derived trial seeds collide");
      seeds.push_back(s);
    }
  }
  return seeds;
}

std::string now_utc() {
  return format_utc(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

ExperimentManifest finish(const ExperimentConfig& cfg, std::vector<TrialRecord> records, std::size_t groups) {
  ExperimentManifest m;
  m.config = cfg;
  m.records = std::move(records);
  m.aggregates = compute_aggregates(m.records, groups);
  m.generated_at = now_utc();
  write_manifest(cfg.output_dir / "manifest.json", m);
  write_text(cfg.output_dir / "summary.txt", manifest_summary_table(m));
  return m;
}

}  // namespace

std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::size_t level_index, std::size_t trial) {
  return base_seed ^ hash_combine(level_index, trial);
}

TrialRecord median_by_mte(std::span<const TrialRecord> records) {
  std::vector<const TrialRecord*> ok;
  for (const auto& r : records) {
    if (r.status == TrialStatus::Ok && r.mte_km) ok.push_back(&r);
  }
  if (ok.empty()) throw Error(Errc::AllTrialsFailed, "all trials failed");
  std::sort(ok.begin(), ok.end(), [](const TrialRecord* a, const TrialRecord* b) {
    if (*a->mte_km != *b->mte_km) return *a->mte_km < *b->mte_km;
    if (a->seed != b->seed) return a->seed < b->seed;
    return std::pair(a->level_index, a->trial) < std::pair(b->level_index, b->trial);
  });
  return *ok[(ok.size() - 1) / 2];
}

std::vector<LevelAggregate> compute_aggregates(std::span<const TrialRecord> records, std::size_t level_count) {
  std::vector<LevelAggregate> out(level_count);
  for (std::size_t l = 0; l < level_count; ++l) {
    LevelAggregate& a = out[l];
    a.level_index = l;
    std::vector<TrialRecord> level_records;
    std::vector<double> mtes;
    for (const auto& r : records) {
      if (r.level_index != l) continue;
      level_records.push_back(r);
      if (r.status == TrialStatus::Ok) {
        ++a.ok_count;
        if (r.mte_km) mtes.push_back(*r.mte_km);
      } else {
        ++a.excluded_count;
      }
    }
    if (mtes.empty()) continue;
    double sum = 0.0;
    for (double v : mtes) sum += v;
    const double mean = sum / static_cast<double>(mtes.size());
    double ss = 0.0;
    for (double v : mtes) ss += (v - mean) * (v - mean);
    a.mean_mte_km = mean;
    a.std_mte_km = std::sqrt(ss / static_cast<double>(mtes.size()));
    const TrialRecord median = median_by_mte(level_records);
    a.median_seed = median.seed;
    a.median_trial = median.trial;
  }
  return out;
}

ExperimentManifest run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ExperimentKind::Noise) throw Error(Errc::BadConfig, "bad config: run_experiment needs kind 'noise'");
  const Inputs in = load_inputs(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const Trajectory truth_track = track_storm(in.truth, cfg.track);
  write_text(cfg.output_dir / "truth_trajectory.csv", trajectory_to_csv(truth_track));

  const std::size_t groups = cfg.levels.size();
  const auto seeds = trial_seeds(cfg, groups);
  std::vector<TrialRecord> records(seeds.size());
  parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
    records[i] = run_noise_trial(cfg, in, truth_track, i / cfg.trials, i % cfg.trials, seeds[i]);
  });
  return finish(cfg, std::move(records), groups);
}

ExperimentManifest run_random_ic_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ExperimentKind::RandomIC) {
    throw Error(Errc::BadConfig, "bad config: run_random_ic_experiment needs kind 'random_ic'");
  }
  const Inputs in = load_inputs(cfg);
  std::filesystem::create_directories(cfg.output_dir);

  const std::size_t groups = cfg.distributions.size();
  const auto seeds = trial_seeds(cfg, groups);
  std::vector<TrialRecord> records(seeds.size());
  parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
    records[i] = run_random_trial(cfg, in, i / cfg.trials, i % cfg.trials, seeds[i]);
  });
  return finish(cfg, std::move(records), groups);
}

ExperimentManifest run(const ExperimentConfig& cfg) {
  return cfg.kind == ExperimentKind::Noise ? run_experiment(cfg) : run_random_ic_experiment(cfg);
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string manifest_to_json(const ExperimentManifest& m) {
  json j;
  j["format"] = "wxr-manifest/1";
  j["generated_at"] = m.generated_at;
  j["config"] = json::parse(experiment_config_to_json(m.config));
  j["records"] = json::array();
  for (const auto& r : m.records) {
    j["records"].push_back({{"level_index", r.level_index},
                            {"trial", r.trial},
                            {"seed", r.seed},
                            {"status", std::string(to_string(r.status))},
                            {"mte_km", opt(r.mte_km)},
                            {"initial_error_std", opt(r.initial_error_std)},
                            {"final_error_std", opt(r.final_error_std)},
                            {"message", r.message},
                            {"artifacts", r.artifacts}});
  }
  j["aggregates"] = json::array();
  for (const auto& a : m.aggregates) {
    j["aggregates"].push_back({{"level_index", a.level_index},
                               {"ok_count", a.ok_count},
                               {"excluded_count", a.excluded_count},
                               {"mean_mte_km", opt(a.mean_mte_km)},
                               {"std_mte_km", opt(a.std_mte_km)},
                               {"median_seed", opt(a.median_seed)},
                               {"median_trial", opt(a.median_trial)}});
  }
  return j.dump(2) + "\n";
}

ExperimentManifest manifest_from_json(std::string_view json_text) {
  ExperimentManifest m;
  try {
    const json j = json::parse(json_text);
    if (j.value("format", std::string()) != "wxr-manifest/1") {
      throw Error(Errc::BadConfig, "bad manifest: unknown format");
    }
    m.generated_at = j.value("generated_at", std::string());
    m.config = parse_experiment_config(j.at("config").dump());
    for (const auto& rj : j.at("records")) {
      TrialRecord r;
      r.level_index = rj.at("level_index").get<std::size_t>();
      r.trial = rj.at("trial").get<std::size_t>();
      r.seed = rj.at("seed").get<std::uint64_t>();
      r.status = parse_status(rj.at("status").get<std::string>());
      r.mte_km = get_opt<double>(rj, "mte_km");
      r.initial_error_std = get_opt<double>(rj, "initial_error_std");
      r.final_error_std = get_opt<double>(rj, "final_error_std");
      r.message = rj.value("message", std::string());
      r.artifacts = rj.value("artifacts", std::vector<std::string>{});
      m.records.push_back(std::move(r));
    }
    for (const auto& aj : j.at("aggregates")) {
      LevelAggregate a;
      a.level_index = aj.at("level_index").get<std::size_t>();
      a.ok_count = aj.at("ok_count").get<std::size_t>();
      a.excluded_count = aj.at("excluded_count").get<std::size_t>();
      a.mean_mte_km = get_opt<double>(aj, "mean_mte_km");
      a.std_mte_km = get_opt<double>(aj, "std_mte_km");
      a.median_seed = get_opt<std::uint64_t>(aj, "median_seed");
      a.median_trial = get_opt<std::size_t>(aj, "median_trial");
      m.aggregates.push_back(a);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::BadConfig, std::string("bad manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const ExperimentManifest& m) {
  write_text(path, manifest_to_json(m));
}

ExperimentManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

namespace {

std::string level_label(const ExperimentConfig& cfg, std::size_t index) {
  if (cfg.kind == ExperimentKind::RandomIC) {
    return index < cfg.distributions.size() ? std::string(to_string(cfg.distributions[index].kind)) : "?";
  }
  if (index >= cfg.levels.size()) return "?";
  const auto& l = cfg.levels[index];
  std::string s = "beta=" + format_double(l.beta);
  if (l.alpha != 0.0) s += " alpha=" + std::string(l.alpha_sign < 0 ? "-" : "+") + format_double(l.alpha);
  return s;
}

std::string fixed(const std::optional<double>& v, int precision = 3) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  return buf;
}

}  // namespace

std::string manifest_summary_table(const ExperimentManifest& m) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %6s %9s %14s %14s %14s\n", "level", "ok", "excluded", "mean_mte_km",
                "std_mte_km", "median_trial");
  out += line;
  for (const auto& a : m.aggregates) {
    const std::string median = a.median_trial ? std::to_string(*a.median_trial) : "-";
    std::snprintf(line, sizeof line, "%-24s %6zu %9zu %14s %14s %14s\n", level_label(m.config, a.level_index).c_str(),
                  a.ok_count, a.excluded_count, fixed(a.mean_mte_km).c_str(), fixed(a.std_mte_km).c_str(),
                  median.c_str());
    out += line;
  }
  std::size_t diverged = 0;
  std::size_t failed = 0;
  for (const auto& r : m.records) {
    diverged += r.status == TrialStatus::Diverged;
    failed += r.status == TrialStatus::Failed;
  }
  out += "trials: " + std::to_string(m.records.size()) + ", diverged: " + std::to_string(diverged) +
         ", failed: " + std::to_string(failed) + "\n";
  return out;
}

std::string mte_table_csv(const ExperimentManifest& m, std::span<const LevelAggregate> aggregates) {
  std::string out = "level_index,label,beta,alpha,alpha_sign,ok,excluded,mean_mte_km,std_mte_km,median_trial,median_seed\n";
  for (const auto& a : aggregates) {
    NoiseLevel l;
    if (m.config.kind == ExperimentKind::Noise && a.level_index < m.config.levels.size()) {
      l = m.config.levels[a.level_index];
    }
    out += std::to_string(a.level_index) + "," + level_label(m.config, a.level_index) + "," + format_double(l.beta) +
           "," + format_double(l.alpha) + "," + std::to_string(l.alpha_sign) + "," + std::to_string(a.ok_count) + "," +
           std::to_string(a.excluded_count) + "," + (a.mean_mte_km ? format_double(*a.mean_mte_km) : "") + "," +
           (a.std_mte_km ? format_double(*a.std_mte_km) : "") + "," +
           (a.median_trial ? std::to_string(*a.median_trial) : "") + "," +
           (a.median_seed ? std::to_string(*a.median_seed) : "") + "\n";
  }
  return out;
}

}  // namespace wxr

#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "wxr/ensemble.hpp"
#include "wxr/error.hpp"
#include "wxr/error_stats.hpp"
#include "wxr/forecast.hpp"
#include "wxr/perturbation.hpp"
#include "wxr/state_io.hpp"
#include "wxr/synthetic.hpp"
#include "wxr/tracking.hpp"

namespace wxr::cli {

namespace fs = std::filesystem;

namespace {

/// Raised for argument problems found after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<fs::path> series_paths(const fs::path& p) {
  if (!fs::exists(p)) throw Error(Errc::Io, "no such file or directory: " + p.string());
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.path().extension() == ".wxs") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error(Errc::Io, "no .wxs files in " + p.string());
  return out;
}

std::vector<FieldSet> load_series(const fs::path& p) {
  std::vector<FieldSet> out;
  for (const auto& path : series_paths(p)) out.push_back(read_state(path));
  return out;
}

std::string state_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%03zu.wxs", k);
  return buf;
}

Region region_from(const std::vector<double>& box) {
  if (box.empty()) return Region::atlantic();
  if (box.size() != 4) throw UsageError("--region takes LAT_MIN LAT_MAX LON_MIN LON_MAX");
  return Region::make(box[0], box[1], box[2], box[3]);
}

std::size_t default_workers() {
  if (const char* env = std::getenv("WXR_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

// --- stats -------------------------------------------------------------------

struct StatsArgs {
  std::string input;
  std::string output;
};

int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
  const FieldSet fs = read_state(a.input);
  const VariableStats stats = measure_stats(fs);
  const auto degenerate = stats.degenerate_channels();
  for (const auto& name : degenerate) err << "warning: degenerate std for " << name << " (constant channel)\n";
  write_stats(a.output, stats);
  out << "wrote " << stats.size() << " variables to " << a.output
      << (degenerate.empty() ? "" : " (" + std::to_string(degenerate.size()) + " degenerate)") << "\n";
  return kSuccess;
}

// --- perturb -----------------------------------------------------------------

struct PerturbArgs {
  std::string input;
  std::string stats;
  std::string output;
  double beta = 0.0;
  double alpha = 0.0;
  int alpha_sign = 1;
  std::uint64_t seed = 0;
};

int cmd_perturb(const PerturbArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.beta >= 0.0 && a.beta <= 1.0)) throw UsageError("beta out of range [0, 1]");
  if (!(a.alpha >= 0.0 && a.alpha <= 1.0)) throw UsageError("alpha out of range [0, 1]");
  if (a.alpha_sign != 1 && a.alpha_sign != -1) throw UsageError("alpha-sign must be 1 or -1");
  if (a.alpha != 0.0) {
    err << "note: biased noise (alpha > 0) is known to drive neural backends into divergent forecasts\n";
  }
  const FieldSet fs = read_state(a.input);
  const VariableStats stats = a.stats.empty() ? compute_stats(fs) : read_stats(a.stats);
  const FieldSet noisy = inject_noise(fs, stats, {a.alpha, a.alpha_sign, a.beta, a.seed});
  write_state(a.output, noisy);
  out << "wrote " << a.output << "\n";
  return kSuccess;
}

// --- randomize ---------------------------------------------------------------

struct RandomizeArgs {
  std::string dist;
  std::string stats;
  std::string output;
  std::uint64_t seed = 0;
  double resolution = 0.25;
  std::string time = "2018-09-13T00:00:00Z";
  int dof = 4;
  double sigma = 1.0;
};

int cmd_randomize(const RandomizeArgs& a, std::ostream& out, std::ostream&) {
  Distribution kind{};
  try {
    kind = parse_distribution(a.dist);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const GridSpec grid = GridSpec::global(a.resolution);
  RandomICSpec spec{{kind, a.dof, a.sigma}, a.seed, read_stats(a.stats)};
  write_state(a.output, random_ic(grid, parse_utc(a.time), spec));
  out << "wrote " << a.output << "\n";
  return kSuccess;
}

// --- forecast ----------------------------------------------------------------

struct ForecastArgs {
  std::string input;
  std::string backend = "surrogate";
  std::size_t steps = 14;
  std::string out_dir;
  int advect = 0;
  double relax = 0.0;
  std::string stats;
  std::string command;
  std::string work_dir;
  long timeout_s = 3600;
  bool clamp = false;
  bool keep_exchange = false;
};

int cmd_forecast(const ForecastArgs& a, std::ostream& out, std::ostream& err) {
  if (a.steps < 1) throw UsageError("--steps must be at least 1");
  BackendDescriptor desc;
  if (a.backend == "surrogate") {
    desc.kind = BackendDescriptor::Kind::Surrogate;
    desc.surrogate = {a.advect, a.relax};
  } else if (a.backend == "external") {
    if (a.command.empty()) throw UsageError("--backend external requires --command");
    desc.kind = BackendDescriptor::Kind::External;
    desc.external.command = a.command;
    desc.external.work_dir = a.work_dir.empty() ? fs::path(a.out_dir) / "exchange" : fs::path(a.work_dir);
    desc.external.timeout = std::chrono::seconds(a.timeout_s);
    desc.external.keep_exchange = a.keep_exchange;
  } else {
    throw UsageError("unknown backend '" + a.backend + "' (expected surrogate or external)");
  }
  try {
    desc.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  const FieldSet ic = read_state(a.input);
  VariableStats reference;
  if (desc.kind == BackendDescriptor::Kind::Surrogate) {
    reference = a.stats.empty() ? measure_stats(ic) : read_stats(a.stats);
  }
  fs::create_directories(a.out_dir);
  auto backend = make_backend(desc, reference);
  try {
    const ForecastRun run = rollout(*backend, ic, a.steps, {a.clamp});
    for (std::size_t k = 0; k < run.states.size(); ++k) write_state(fs::path(a.out_dir) / state_name(k), run.states[k]);
    out << "wrote " << run.states.size() << " states to " << a.out_dir << "\n";
    return kSuccess;
  } catch (const RolloutError& e) {
    for (std::size_t k = 0; k < e.partial().size(); ++k) {
      write_state(fs::path(a.out_dir) / state_name(k), e.partial()[k]);
    }
    err << "error: forecast failed at step " << e.failed_step() << ": " << e.what() << "\n";
    if (e.exit_code() != 0) err << "backend exit code: " << e.exit_code() << "\n";
    return kBackendFailure;
  }
}

// --- track -------------------------------------------------------------------

struct TrackArgs {
  std::string forecast;
  std::string truth;
  std::string out_dir;
  std::vector<double> region;
  double radius_km = 0.0;
};

int cmd_track(const TrackArgs& a, std::ostream& out, std::ostream&) {
  TrackConfig cfg;
  cfg.region = region_from(a.region);
  if (a.radius_km > 0.0) cfg.continuity_radius_km = a.radius_km;
  const auto forecast = load_series(a.forecast);
  const Trajectory pred = track_storm(forecast, cfg);
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    write_text(fs::path(a.out_dir) / "forecast_trajectory.csv", trajectory_to_csv(pred));
  } else {
    out << trajectory_to_csv(pred);
  }
  if (!a.truth.empty()) {
    const Trajectory truth = track_storm(load_series(a.truth), cfg);
    if (!a.out_dir.empty()) write_text(fs::path(a.out_dir) / "truth_trajectory.csv", trajectory_to_csv(truth));
    const double mte = mean_trajectory_error(pred, truth);
    out << "mte_km," << format_double(mte) << "\n";
    if (!a.out_dir.empty()) write_text(fs::path(a.out_dir) / "mte.csv", "mte_km\n" + format_double(mte) + "\n");
  }
  return kSuccess;
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string forecast;
  std::string truth;
  std::string out_dir;
  std::string variable = "msl";
  std::vector<double> region;
  bool global = false;
  double range = 7.5;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
  if (!(a.range > 0.0)) throw UsageError("--range must be positive");
  const std::optional<Region> mask = a.global ? std::nullopt : std::optional<Region>(region_from(a.region));
  const auto forecast = load_series(a.forecast);
  const auto truth = load_series(a.truth);
  const auto series = series_over_time(forecast, truth, a.variable, mask, a.range);

  fs::create_directories(a.out_dir);
  std::string csv = "timestep,valid_time," + std::string(summary_csv_columns()) + "\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    csv += std::to_string(k) + "," + format_utc(forecast[k].valid_time()) + "," + summary_csv_row(series[k]) + "\n";
    char name[48];
    std::snprintf(name, sizeof name, "hist_step%02zu.csv", k);
    write_text(fs::path(a.out_dir) / name, histogram_to_csv(series[k].histogram));
  }
  write_text(fs::path(a.out_dir) / "summary.csv", csv);
  out << "wrote " << series.size() << " summaries to " << a.out_dir << "\n";
  return kSuccess;
}

// --- ensemble ----------------------------------------------------------------

struct EnsembleArgs {
  std::string config;
  std::string output;
  std::size_t workers = 0;
  std::size_t trials = 0;
  std::optional<std::uint64_t> seed;
  bool keep_states = false;
  bool explicit_levels = false;
};

int cmd_ensemble(const EnsembleArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  cfg.workers = a.workers > 0 ? a.workers : std::max<std::size_t>(cfg.workers, default_workers());
  if (!a.output.empty()) cfg.output_dir = a.output;
  if (a.trials > 0) cfg.trials = a.trials;
  if (a.seed) cfg.base_seed = *a.seed;
  if (a.keep_states) cfg.keep_states = true;
  if (a.explicit_levels) cfg.level_mode = LevelMode::Explicit;

  const ExperimentManifest m = run(cfg);
  out << manifest_summary_table(m);
  out << "manifest: " << (cfg.output_dir / "manifest.json").string() << "\n";
  for (const auto& r : m.records) {
    if (r.status != TrialStatus::Ok) err << "trial L" << r.level_index << " T" << r.trial << " " << to_string(r.status) << ": " << r.message << "\n";
  }
  return kSuccess;
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
  std::string manifest;
  std::string out_dir;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  const fs::path manifest_path(a.manifest);
  const ExperimentManifest m = read_manifest(manifest_path);
  const std::size_t groups =
      m.config.kind == ExperimentKind::Noise ? m.config.levels.size() : m.config.distributions.size();
  const auto recomputed = compute_aggregates(m.records, groups);
  if (recomputed != m.aggregates) err << "warning: manifest aggregates differ from recomputation; using recomputed values\n";

  const fs::path out_dir = a.out_dir.empty() ? manifest_path.parent_path() / "report" : fs::path(a.out_dir);
  fs::create_directories(out_dir);
  const std::string table = mte_table_csv(m, recomputed);
  write_text(out_dir / "mte_by_level.csv", table);
  out << table;

  // Per-timestep tables for each level's median trial (or every trial when no MTE exists).
  const fs::path root = manifest_path.parent_path();
  for (const auto& agg : recomputed) {
    for (const auto& r : m.records) {
      if (r.level_index != agg.level_index || r.status != TrialStatus::Ok) continue;
      if (agg.median_trial && r.trial != *agg.median_trial) continue;
      for (const auto& artifact : r.artifacts) {
        const fs::path p(artifact);
        if (!p.filename().string().starts_with("summary_")) continue;
        char name[96];
        std::snprintf(name, sizeof name, "timestep_L%02zu_T%03zu_%s", r.level_index, r.trial,
                      p.filename().string().substr(8).c_str());
        write_text(out_dir / name, read_text(root / p));
      }
    }
  }
  out << "report written to " << out_dir.string() << "\n";
  return kSuccess;
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
  std::string output;
  double resolution = 1.0;
  std::string time = "2018-09-13T00:00:00Z";
  double storm_lat = 33.0;
  double storm_lon = -75.0;
  double depth_pa = 4000.0;
  std::uint64_t seed = 1;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
  SyntheticOptions opt;
  opt.storm_center = {a.storm_lat, normalize_lon(a.storm_lon)};
  opt.storm_depth_pa = a.depth_pa;
  opt.seed = a.seed;
  write_state(a.output, make_synthetic_state(GridSpec::global(a.resolution), parse_utc(a.time), opt));
  out << "wrote " << a.output << "\n";
  return kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"wxr: robustness experiments for gridded forecast models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "wxr 0.1.0");

  StatsArgs stats;
  auto* sc_stats = app.add_subcommand("stats", "Compute per-variable mean/std of a snapshot");
  sc_stats->add_option("input", stats.input, "Input .wxs snapshot")->required();
  sc_stats->add_option("output", stats.output, "Output .stats.csv")->required();

  PerturbArgs perturb;
  auto* sc_perturb = app.add_subcommand("perturb", "Add Gaussian noise to a snapshot");
  sc_perturb->add_option("input", perturb.input, "Input .wxs snapshot")->required();
  sc_perturb->add_option("-o,--out", perturb.output, "Output .wxs")->required();
  sc_perturb->add_option("--stats", perturb.stats, "Stats file (default: computed from input)");
  sc_perturb->add_option("--beta", perturb.beta, "Noise std as a fraction of each variable's std");
  sc_perturb->add_option("--alpha", perturb.alpha, "Noise mean as a fraction of each variable's mean");
  sc_perturb->add_option("--alpha-sign", perturb.alpha_sign, "Sign of the mean bias (1 or -1)");
  sc_perturb->add_option("--seed", perturb.seed, "Random seed");

  RandomizeArgs randomize;
  auto* sc_random = app.add_subcommand("randomize", "Generate a fully random initial condition");
  sc_random->add_option("--dist", randomize.dist, "chi2 | lognormal | normal | uniform")->required();
  sc_random->add_option("--stats", randomize.stats, "Target per-variable stats")->required();
  sc_random->add_option("-o,--out", randomize.output, "Output .wxs")->required();
  sc_random->add_option("--seed", randomize.seed, "Random seed");
  sc_random->add_option("--resolution", randomize.resolution, "Grid resolution in degrees");
  sc_random->add_option("--time", randomize.time, "Valid time (UTC, ISO 8601)");
  sc_random->add_option("--dof", randomize.dof, "Chi-square degrees of freedom");
  sc_random->add_option("--sigma", randomize.sigma, "Lognormal log-space sigma");

  ForecastArgs forecast;
  auto* sc_forecast = app.add_subcommand("forecast", "Roll out a forecast");
  sc_forecast->add_option("input", forecast.input, "Initial condition .wxs")->required();
  sc_forecast->add_option("-o,--out", forecast.out_dir, "Output directory")->required();
  sc_forecast->add_option("--backend", forecast.backend, "surrogate | external");
  sc_forecast->add_option("--steps", forecast.steps, "Number of 6-hour steps");
  sc_forecast->add_option("--advect", forecast.advect, "Surrogate zonal shift per step (cells)");
  sc_forecast->add_option("--relax", forecast.relax, "Surrogate relaxation rate in [0, 1]");
  sc_forecast->add_option("--stats", forecast.stats, "Surrogate relaxation targets (default: from input)");
  sc_forecast->add_option("--command", forecast.command, "External backend command");
  sc_forecast->add_option("--workdir", forecast.work_dir, "Exchange directory root");
  sc_forecast->add_option("--timeout", forecast.timeout_s, "External step timeout in seconds");
  sc_forecast->add_flag("--clamp", forecast.clamp, "Clamp relative humidity to [0, 100] after each step");
  sc_forecast->add_flag("--keep-exchange", forecast.keep_exchange, "Keep exchange directories");

  TrackArgs track;
  auto* sc_track = app.add_subcommand("track", "Track the storm center and compute MTE");
  sc_track->add_option("--forecast", track.forecast, "Forecast directory or file")->required();
  sc_track->add_option("--truth", track.truth, "Truth directory or file");
  sc_track->add_option("-o,--out", track.out_dir, "Output directory (default: stdout)");
  sc_track->add_option("--region", track.region, "LAT_MIN LAT_MAX LON_MIN LON_MAX")->expected(4);
  sc_track->add_option("--radius", track.radius_km, "Continuity radius in km (0 disables)");

  EvaluateArgs evaluate;
  auto* sc_eval = app.add_subcommand("evaluate", "Error distribution summaries per timestep");
  sc_eval->add_option("--forecast", evaluate.forecast, "Forecast directory")->required();
  sc_eval->add_option("--truth", evaluate.truth, "Truth directory")->required();
  sc_eval->add_option("-o,--out", evaluate.out_dir, "Output directory")->required();
  sc_eval->add_option("--variable", evaluate.variable, "Variable name");
  sc_eval->add_option("--region", evaluate.region, "LAT_MIN LAT_MAX LON_MIN LON_MAX")->expected(4);
  sc_eval->add_flag("--global", evaluate.global, "Use the whole grid");
  sc_eval->add_option("--range", evaluate.range, "Histogram half-range");

  EnsembleArgs ensemble;
  std::uint64_t ensemble_seed = 0;
  auto* sc_ensemble = app.add_subcommand("ensemble", "Run an experiment from a JSON config");
  sc_ensemble->add_option("config", ensemble.config, "Experiment config (JSON)")->required();
  sc_ensemble->add_option("-o,--out", ensemble.output, "Override output directory");
  sc_ensemble->add_option("--workers", ensemble.workers, "Worker threads (default: $WXR_WORKERS or 1)");
  sc_ensemble->add_option("--trials", ensemble.trials, "Override trials per level");
  auto* seed_opt = sc_ensemble->add_option("--seed", ensemble_seed, "Override base seed");
  sc_ensemble->add_flag("--keep-states", ensemble.keep_states, "Persist every forecast state");
  sc_ensemble->add_flag("--explicit-levels", ensemble.explicit_levels, "Accept any noise level in [0, 1]");

  ReportArgs report;
  auto* sc_report = app.add_subcommand("report", "Collate a manifest into plot-ready tables");
  sc_report->add_option("manifest", report.manifest, "manifest.json")->required();
  sc_report->add_option("-o,--out", report.out_dir, "Output directory (default: <manifest dir>/report)");

  SynthArgs synth;
  auto* sc_synth = app.add_subcommand("synth", "Write a synthetic snapshot with one cyclone");
  sc_synth->add_option("-o,--out", synth.output, "Output .wxs")->required();
  sc_synth->add_option("--resolution", synth.resolution, "Grid resolution in degrees");
  sc_synth->add_option("--time", synth.time, "Valid time (UTC, ISO 8601)");
  sc_synth->add_option("--storm-lat", synth.storm_lat, "Cyclone latitude");
  sc_synth->add_option("--storm-lon", synth.storm_lon, "Cyclone longitude");
  sc_synth->add_option("--depth", synth.depth_pa, "Central pressure deficit (Pa)");
  sc_synth->add_option("--seed", synth.seed, "Texture seed");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << "wxr 0.1.0\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (sc_stats->parsed()) return cmd_stats(stats, out, err);
    if (sc_perturb->parsed()) return cmd_perturb(perturb, out, err);
    if (sc_random->parsed()) return cmd_randomize(randomize, out, err);
    if (sc_forecast->parsed()) return cmd_forecast(forecast, out, err);
    if (sc_track->parsed()) return cmd_track(track, out, err);
    if (sc_eval->parsed()) return cmd_evaluate(evaluate, out, err);
    if (sc_ensemble->parsed()) {
      if (seed_opt->count() > 0) ensemble.seed = ensemble_seed;
      return cmd_ensemble(ensemble, out, err);
    }
    if (sc_report->parsed()) return cmd_report(report, out, err);
    if (sc_synth->parsed()) return cmd_synth(synth, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const RolloutError& e) {
    err << "error: forecast failed at step " << e.failed_step() << ": " << e.what() << "\n";
    return kBackendFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_backend_error(e.code()) ? kBackendFailure : kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  err << "error: no command\n";
  return kUsageError;
}

}  // namespace wxr::cli

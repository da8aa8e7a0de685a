#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wxr/forecast.hpp"
#include "wxr/perturbation.hpp"
#include "wxr/tracking.hpp"

namespace wxr {

struct NoiseLevel {
  double beta = 0.0;
  double alpha = 0.0;
  int alpha_sign = +1;

  bool operator==(const NoiseLevel&) const = default;
};

/// How noise levels are validated: Default accepts only the canonical set
/// {0, 0.02, 0.05, 0.10, 0.20, 0.35, 0.50}; Explicit accepts any value in [0, 1].
enum class LevelMode { Default, Explicit };

std::span<const double> canonical_levels() noexcept;
std::vector<NoiseLevel> default_noise_levels();

/// Throws wxr::Error(BadConfig) naming the first rejected level.
void validate_noise_levels(std::span<const NoiseLevel> levels, LevelMode mode);

enum class ExperimentKind { Noise, RandomIC };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Noise;
  /// Truth snapshots at consecutive 6-hour steps; the first is the initial condition.
  std::vector<std::filesystem::path> truth_paths;
  std::vector<NoiseLevel> levels = default_noise_levels();
  LevelMode level_mode = LevelMode::Default;
  /// Random-IC experiments only.
  std::vector<BaseDistribution> distributions;
  std::size_t trials = 30;
  std::uint64_t base_seed = 0;
  BackendDescriptor backend;
  bool clamp = false;
  TrackConfig track;
  std::string variable = "msl";
  /// Regional summaries are skipped when unset.
  std::optional<Region> regional_mask = Region::atlantic();
  bool global_summaries = true;
  /// The first range drives the summary coverage; each range gets its own histogram files.
  std::vector<double> hist_ranges{7.5, 15.0};
  std::filesystem::path output_dir = "wxr-out";
  std::size_t workers = 1;
  bool keep_states = false;

  /// Throws wxr::Error(BadConfig).
  void validate() const;
};

/// JSON config file; keys mirror the struct fields. Unknown keys are rejected.
/// Relative paths resolve against base_dir. Value checks are left to validate().
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir = {});
std::string experiment_config_to_json(const ExperimentConfig& cfg);

enum class TrialStatus { Ok, Diverged, Failed };
std::string_view to_string(TrialStatus s) noexcept;

struct TrialRecord {
  /// Index into ExperimentConfig::levels (or ::distributions for random-IC runs).
  std::size_t level_index = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::Ok;
  /// Absent for random-IC runs and failed trials.
  std::optional<double> mte_km;
  /// Std of the first and last global error summaries.
  std::optional<double> initial_error_std;
  std::optional<double> final_error_std;
  std::string message;
  /// Relative to the experiment output directory.
  std::vector<std::string> artifacts;

  bool operator==(const TrialRecord&) const = default;
};

struct LevelAggregate {
  std::size_t level_index = 0;
  std::size_t ok_count = 0;
  /// Diverged or failed trials, left out of the MTE statistics.
  std::size_t excluded_count = 0;
  std::optional<double> mean_mte_km;
  /// Population standard deviation over successful trials.
  std::optional<double> std_mte_km;
  std::optional<std::uint64_t> median_seed;
  std::optional<std::size_t> median_trial;

  bool operator==(const LevelAggregate&) const = default;
};

struct ExperimentManifest {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  std::vector<LevelAggregate> aggregates;
  /// Wall-clock metadata; excluded from determinism comparisons.
  std::string generated_at;
};

/// Seed for (level, trial): base_seed XOR hash(level, trial).
std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::size_t level_index, std::size_t trial);

/// Successful records sorted by (MTE, seed, level, trial); returns the element at (n - 1) / 2.
/// Throws wxr::Error(AllTrialsFailed) if no record succeeded.
TrialRecord median_by_mte(std::span<const TrialRecord> records);

/// Per-level MTE statistics recomputed from records.
std::vector<LevelAggregate> compute_aggregates(std::span<const TrialRecord> records, std::size_t level_count);

/// Noise-injection experiment: perturb, roll out, track, evaluate per (level, trial).
ExperimentManifest run_experiment(const ExperimentConfig& cfg);
/// Fully random initial conditions, global evaluation only.
ExperimentManifest run_random_ic_experiment(const ExperimentConfig& cfg);
/// Dispatches on cfg.kind.
ExperimentManifest run(const ExperimentConfig& cfg);

std::string manifest_to_json(const ExperimentManifest& m);
ExperimentManifest manifest_from_json(std::string_view json_text);
void write_manifest(const std::filesystem::path& path, const ExperimentManifest& m);
ExperimentManifest read_manifest(const std::filesystem::path& path);

/// Human-readable per-level table.
std::string manifest_summary_table(const ExperimentManifest& m);

/// `level_index,label,beta,alpha,alpha_sign,ok,excluded,mean_mte_km,std_mte_km,median_trial,median_seed`.
std::string mte_table_csv(const ExperimentManifest& m, std::span<const LevelAggregate> aggregates);

}  // namespace wxr

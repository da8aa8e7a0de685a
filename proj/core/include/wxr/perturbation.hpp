#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wxr/field_set.hpp"
#include "wxr/rng.hpp"
#include "wxr/variable_stats.hpp"

namespace wxr {

/// Per-channel mean and population standard deviation (1/N), accumulated in
/// double. Does not reject constant channels; see degenerate_channels().
VariableStats measure_stats(const FieldSet& fs);

/// measure_stats() followed by validation: a constant channel raises
/// wxr::Error(DegenerateStd) naming the variable.
VariableStats compute_stats(const FieldSet& fs);

/// Gaussian perturbation x~ = x + xi, xi ~ N(alpha_sign * alpha * mean_x, beta * std_x).
struct NoiseSpec {
  double alpha = 0.0;
  int alpha_sign = +1;
  double beta = 0.0;
  std::uint64_t seed = 0;

  /// Throws wxr::Error(InvalidArgument) unless alpha, beta in [0, 1] and
  /// alpha_sign is +1 or -1.
  void validate() const;
  bool is_zero() const noexcept { return alpha == 0.0 && beta == 0.0; }
};

/// The noise field xi for one channel, in native units (double precision).
/// Channel c always draws from substream (seed, c).
std::vector<double> channel_noise(std::size_t channel, std::size_t count, const ChannelStats& stats,
                                  const NoiseSpec& spec);

/// Adds independent Gaussian noise to every grid point of every variable.
/// alpha = beta = 0 returns a bitwise copy without consuming randomness.
FieldSet inject_noise(const FieldSet& fs, const VariableStats& stats, const NoiseSpec& spec);

enum class Distribution { Chi2, Lognormal, Normal, Uniform };

std::string_view to_string(Distribution d) noexcept;
/// Throws wxr::Error(InvalidArgument, "unsupported distribution: ...").
Distribution parse_distribution(std::string_view name);

struct BaseDistribution {
  Distribution kind = Distribution::Normal;
  /// Degrees of freedom for chi2 (integer, >= 1).
  int chi2_dof = 4;
  /// Log-space standard deviation for lognormal; log-space mean is 0.
  double lognormal_sigma = 1.0;

  /// Throws wxr::Error(BadDistributionSpec).
  void validate() const;
};

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

/// Closed-form mean and standard deviation of the base distribution.
Moments analytic_moments(const BaseDistribution& dist);

/// One raw draw from the base distribution.
double sample_base(const BaseDistribution& dist, CounterRng& rng, NormalSampler& normal);

/// `count` draws standardized with analytic_moments(): (x - mean) / std.
std::vector<double> standardized_samples(const BaseDistribution& dist, CounterRng& rng,
                                         std::size_t count);

struct RandomICSpec {
  BaseDistribution distribution;
  std::uint64_t seed = 0;
  VariableStats target;
};

/// Fully random state: per variable, standardized i.i.d. base draws rescaled
/// to target mean and std. No physical bounds are enforced.
FieldSet random_ic(const GridSpec& grid, TimePoint valid_time, const RandomICSpec& spec);

}  // namespace wxr

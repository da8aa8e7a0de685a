#include "wxr/perturbation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wxr/error.hpp"

namespace wxr {

VariableStats measure_stats(const FieldSet& fs) {
  std::vector<ChannelStats> entries(kChannelCount);
  const auto n = static_cast<double>(fs.grid().point_count());
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const auto values = fs.channel(c);
    double sum = 0.0;
    for (float v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (float v : values) {
      const double d = static_cast<double>(v) - mean;
      ss += d * d;
    }
    entries[c] = {mean, std::sqrt(ss / n)};
  }
  return VariableStats(std::move(entries));
}

VariableStats compute_stats(const FieldSet& fs) {
  VariableStats stats = measure_stats(fs);
  stats.validate();
  return stats;
}

void NoiseSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::InvalidArgument, "alpha out of range [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error(Errc::InvalidArgument, "beta out of range [0, 1]");
  if (alpha_sign != 1 && alpha_sign != -1) throw Error(Errc::InvalidArgument, "alpha_sign must be +1 or -1");
}

std::vector<double> channel_noise(std::size_t channel, std::size_t count, const ChannelStats& stats,
                                  const NoiseSpec& spec) {
  const double mean = spec.alpha_sign * spec.alpha * stats.mean;
  const double sd = spec.beta * stats.std;
  std::vector<double> out(count, mean);
  if (sd == 0.0) return out;
  auto rng = CounterRng::substream(spec.seed, channel);
  NormalSampler normal;
  for (auto& x : out) x += sd * normal(rng);
  return out;
}

FieldSet inject_noise(const FieldSet& fs, const VariableStats& stats, const NoiseSpec& spec) {
  spec.validate();
  if (stats.size() != kChannelCount) throw Error(Errc::MissingStats, "missing stats");
  if (spec.is_zero()) return fs;

  const std::size_t n = fs.grid().point_count();
  std::vector<float> out(fs.values().begin(), fs.values().end());
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const auto noise = channel_noise(c, n, stats[c], spec);
    float* dst = out.data() + c * n;
    for (std::size_t k = 0; k < n; ++k) dst[k] = static_cast<float>(static_cast<double>(dst[k]) + noise[k]);
  }
  try {
    return FieldSet(fs.grid(), fs.valid_time(), std::move(out));
  } catch (const Error& e) {
    if (e.code() == Errc::NonFinite) throw Error(Errc::NonFinite, std::string("non-finite perturbation: ") + e.what());
    throw;
  }
}

std::string_view to_string(Distribution d) noexcept {
  switch (d) {
    case Distribution::Chi2: return "chi2";
    case Distribution::Lognormal: return "lognormal";
    case Distribution::Normal: return "normal";
    case Distribution::Uniform: return "uniform";
  }
  return "?";
}

Distribution parse_distribution(std::string_view name) {
  if (name == "chi2") return Distribution::Chi2;
  if (name == "lognormal") return Distribution::Lognormal;
  if (name == "normal") return Distribution::Normal;
  if (name == "uniform") return Distribution::Uniform;
  throw Error(Errc::InvalidArgument, "unsupported distribution: " + std::string(name));
}

void BaseDistribution::validate() const {
  if (kind == Distribution::Chi2 && chi2_dof < 1) {
    throw Error(Errc::BadDistributionSpec, "bad distribution spec: chi2 needs at least 1 degree of freedom");
  }
  if (kind == Distribution::Lognormal && !(lognormal_sigma > 0.0 && std::isfinite(lognormal_sigma))) {
    throw Error(Errc::BadDistributionSpec, "bad distribution spec: lognormal sigma must be positive");
  }
}

Moments analytic_moments(const BaseDistribution& dist) {
  dist.validate();
  switch (dist.kind) {
    case Distribution::Chi2: {
      const double k = dist.chi2_dof;
      return {k, std::sqrt(2.0 * k)};
    }
    case Distribution::Lognormal: {
      const double s2 = dist.lognormal_sigma * dist.lognormal_sigma;
      return {std::exp(s2 / 2.0), std::sqrt(std::expm1(s2) * std::exp(s2))};
    }
    case Distribution::Normal: return {0.0, 1.0};
    case Distribution::Uniform: return {0.5, 1.0 / std::sqrt(12.0)};
  }
  return {};
}

double sample_base(const BaseDistribution& dist, CounterRng& rng, NormalSampler& normal) {
  switch (dist.kind) {
    case Distribution::Chi2: {
      double sum = 0.0;
      for (int i = 0; i < dist.chi2_dof; ++i) {
        const double z = normal(rng);
        sum += z * z;
      }
      return sum;
    }
    case Distribution::Lognormal: return std::exp(dist.lognormal_sigma * normal(rng));
    case Distribution::Normal: return normal(rng);
    case Distribution::Uniform: return rng.uniform01();
  }
  return 0.0;
}

std::vector<double> standardized_samples(const BaseDistribution& dist, CounterRng& rng, std::size_t count) {
  const Moments m = analytic_moments(dist);
  NormalSampler normal;
  std::vector<double> out(count);
  for (auto& x : out) x = (sample_base(dist, rng, normal) - m.mean) / m.std;
  return out;
}

FieldSet random_ic(const GridSpec& grid, TimePoint valid_time, const RandomICSpec& spec) {
  spec.distribution.validate();
  spec.target.validate();

  const std::size_t n = grid.point_count();
  std::vector<float> values(kChannelCount * n);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    auto rng = CounterRng::substream(spec.seed, c);
    const auto z = standardized_samples(spec.distribution, rng, n);
    const auto& target = spec.target[c];
    float* dst = values.data() + c * n;
    for (std::size_t k = 0; k < n; ++k) dst[k] = static_cast<float>(target.mean + target.std * z[k]);
  }
  return FieldSet(grid, valid_time, std::move(values));
}

}  // namespace wxr

#include "wxr/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <system_error>

#include "subprocess.hpp"
#include "wxr/state_io.hpp"

namespace wxr {

void SurrogateParams::validate() const {
  if (!(relax_rate >= 0.0 && relax_rate <= 1.0)) {
    throw Error(Errc::InvalidArgument, "surrogate relax_rate must be in [0, 1]");
  }
}

void BackendDescriptor::validate() const {
  if (timestep != kModelTimestep) throw Error(Errc::InvalidArgument, "backend timestep must be 6 hours");
  switch (kind) {
    case Kind::Surrogate: surrogate.validate(); break;
    case Kind::External:
      if (external.command.empty()) throw Error(Errc::InvalidArgument, "external backend needs a command");
      if (external.timeout.count() <= 0) throw Error(Errc::InvalidArgument, "external backend timeout must be positive");
      break;
  }
}

FieldSet surrogate_step(const FieldSet& state, const SurrogateParams& params, const VariableStats& reference) {
  params.validate();
  const GridSpec& grid = state.grid();
  const std::size_t nlat = grid.lat_count();
  const std::size_t nlon = grid.lon_count();
  const auto shift = static_cast<std::size_t>(
      ((static_cast<long long>(params.advect_cells_lon) % static_cast<long long>(nlon)) + static_cast<long long>(nlon)) %
      static_cast<long long>(nlon));
  const double keep = 1.0 - params.relax_rate;

  std::vector<float> out(state.values().size());
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const double target = params.relax_rate * reference[c].mean;
    const auto in = state.channel(c);
    float* dst = out.data() + c * nlat * nlon;
    for (std::size_t i = 0; i < nlat; ++i) {
      const float* src_row = in.data() + i * nlon;
      float* dst_row = dst + i * nlon;
      for (std::size_t j = 0; j < nlon; ++j) {
        // Eastward shift: the value at column j came from column j - shift.
        const float v = src_row[(j + nlon - shift) % nlon];
        dst_row[j] = params.relax_rate == 0.0 ? v : static_cast<float>(keep * v + target);
      }
    }
  }
  return FieldSet(grid, state.valid_time() + kModelTimestep, std::move(out));
}

SurrogateBackend::SurrogateBackend(SurrogateParams params, VariableStats reference)
    : reference_(std::move(reference)) {
  params.validate();
  descriptor_.kind = BackendDescriptor::Kind::Surrogate;
  descriptor_.surrogate = params;
}

FieldSet SurrogateBackend::step(const FieldSet& state) {
  return surrogate_step(state, descriptor_.surrogate, reference_);
}

FieldSet external_step(const FieldSet& state, const ExternalParams& params,
                       const std::filesystem::path& exchange_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::remove_all(exchange_dir, ec);
  fs::create_directories(exchange_dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create exchange directory " + exchange_dir.string());

  const fs::path input = exchange_dir / "input.wxs";
  const fs::path output = exchange_dir / "output.wxs";
  const fs::path log = exchange_dir / "backend.log";
  write_state(input, state);

  std::string command = params.command;
  const std::string quoted = detail::shell_quote(fs::absolute(exchange_dir).string());
  if (auto pos = command.find("{dir}"); pos != std::string::npos) {
    do {
      command.replace(pos, 5, quoted);
      pos = command.find("{dir}", pos + quoted.size());
    } while (pos != std::string::npos);
  } else {
    command += " " + quoted;
  }

  const auto result = detail::run_shell(command, log, params.timeout);
  if (result.timed_out) {
    throw BackendError(Errc::BackendTimeout, "backend timeout after " + std::to_string(params.timeout.count()) + " s",
                       0, detail::read_tail(log));
  }
  if (result.signaled || result.exit_code != 0) {
    const std::string diag = detail::read_tail(log);
    const std::string what = result.signaled ? "killed by signal " + std::to_string(result.exit_code)
                                             : "exit code " + std::to_string(result.exit_code);
    throw BackendError(Errc::BackendProcessFailed,
                       "backend process failed (" + what + ")" + (diag.empty() ? "" : ": " + diag),
                       result.signaled ? -1 : result.exit_code, diag);
  }
  if (!fs::exists(output)) throw BackendError(Errc::BadBackendOutput, "bad backend output: output.wxs missing");

  FieldSet next = [&] {
    try {
      return read_state(output);
    } catch (const Error& e) {
      if (e.code() == Errc::NonFinite) throw BackendError(Errc::BackendNonFinite, e.what());
      throw BackendError(Errc::BadBackendOutput, std::string("bad backend output: ") + e.what());
    }
  }();
  if (!(next.grid() == state.grid())) {
    throw BackendError(Errc::BadBackendOutput, "bad backend output: dim mismatch (grid differs from input)");
  }
  if (next.valid_time() != state.valid_time() + kModelTimestep) {
    throw BackendError(Errc::BadBackendOutput, "bad backend output: valid_time " + format_utc(next.valid_time()) +
                                                   ", expected " + format_utc(state.valid_time() + kModelTimestep));
  }
  if (!params.keep_exchange) fs::remove_all(exchange_dir, ec);
  return next;
}

ExternalBackend::ExternalBackend(ExternalParams params) {
  descriptor_.kind = BackendDescriptor::Kind::External;
  descriptor_.external = std::move(params);
  descriptor_.validate();
}

FieldSet ExternalBackend::step(const FieldSet& state) {
  char name[32];
  std::snprintf(name, sizeof name, "step_%04zu", calls_++);
  return external_step(state, descriptor_.external, descriptor_.external.work_dir / name);
}

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor, const VariableStats& reference) {
  descriptor.validate();
  if (descriptor.kind == BackendDescriptor::Kind::External) {
    return std::make_unique<ExternalBackend>(descriptor.external);
  }
  return std::make_unique<SurrogateBackend>(descriptor.surrogate, reference);
}

FieldSet clamp_physical(const FieldSet& state) {
  std::vector<float> out(state.values().begin(), state.values().end());
  const std::size_t n = state.grid().point_count();
  for (std::size_t c : humidity_channels()) {
    for (std::size_t k = c * n; k < (c + 1) * n; ++k) out[k] = std::clamp(out[k], 0.0f, 100.0f);
  }
  return FieldSet(state.grid(), state.valid_time(), std::move(out));
}

ForecastRun rollout(Backend& backend, const FieldSet& ic, std::size_t steps, const RolloutOptions& options) {
  if (steps == 0) throw Error(Errc::InvalidArgument, "rollout needs at least one step");
  ForecastRun run;
  run.backend = backend.descriptor();
  run.states.reserve(steps + 1);
  run.states.push_back(options.clamp ? clamp_physical(ic) : ic);

  for (std::size_t k = 1; k <= steps; ++k) {
    const FieldSet& prev = run.states.back();
    try {
      FieldSet next = backend.step(prev);
      if (!(next.grid() == prev.grid()) || next.valid_time() != prev.valid_time() + kModelTimestep) {
        throw Error(Errc::BadBackendOutput, "bad backend output: grid or valid_time does not follow the input");
      }
      run.states.push_back(options.clamp ? clamp_physical(next) : std::move(next));
    } catch (const BackendError& e) {
      throw RolloutError(e.code(), "step " + std::to_string(k) + ": " + e.what(), k, std::move(run.states),
                         e.exit_code());
    } catch (const Error& e) {
      if (e.code() == Errc::NonFinite || e.code() == Errc::BackendNonFinite) {
        throw RolloutError(Errc::BackendNonFinite,
                           "step " + std::to_string(k) + ": backend produced non-finite state", k,
                           std::move(run.states));
      }
      throw RolloutError(e.code(), "step " + std::to_string(k) + ": " + e.what(), k, std::move(run.states));
    }
  }
  return run;
}

}  // namespace wxr

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "wxr/error.hpp"
#include "wxr/field_set.hpp"
#include "wxr/variable_stats.hpp"

namespace wxr {

/// Toy dynamics: zonal circular shift followed by linear relaxation toward
/// each channel's reference mean.
struct SurrogateParams {
  int advect_cells_lon = 0;
  double relax_rate = 0.0;

  void validate() const;
};

/// An out-of-process model driven through the exchange-directory protocol.
struct ExternalParams {
  /// Shell command. `{dir}` is replaced by the quoted exchange directory;
  /// without the placeholder the directory is appended as the last argument.
  std::string command;
  /// Parent of the per-step exchange directories.
  std::filesystem::path work_dir;
  std::chrono::seconds timeout{3600};
  /// Leave exchange directories on disk after successful steps.
  bool keep_exchange = false;
};

struct BackendDescriptor {
  enum class Kind { Surrogate, External };

  Kind kind = Kind::Surrogate;
  std::chrono::hours timestep = kModelTimestep;
  SurrogateParams surrogate;
  ExternalParams external;

  /// Throws wxr::Error(InvalidArgument) unless timestep is 6 h and the
  /// kind-specific parameters are valid.
  void validate() const;
};

class Backend {
 public:
  virtual ~Backend() = default;

  /// Advances one 6-hour step.
  virtual FieldSet step(const FieldSet& state) = 0;
  virtual const BackendDescriptor& descriptor() const noexcept = 0;
};

FieldSet surrogate_step(const FieldSet& state, const SurrogateParams& params,
                        const VariableStats& reference);

class SurrogateBackend final : public Backend {
 public:
  SurrogateBackend(SurrogateParams params, VariableStats reference);

  FieldSet step(const FieldSet& state) override;
  const BackendDescriptor& descriptor() const noexcept override { return descriptor_; }

 private:
  BackendDescriptor descriptor_;
  VariableStats reference_;
};

/// Raised for backend process failures; carries the exit status and captured
/// output when available.
class BackendError : public Error {
 public:
  BackendError(Errc code, const std::string& message, int exit_code = 0, std::string diagnostics = {})
      : Error(code, message), exit_code_(exit_code), diagnostics_(std::move(diagnostics)) {}

  int exit_code() const noexcept { return exit_code_; }
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  int exit_code_;
  std::string diagnostics_;
};

/// One protocol round trip in `exchange_dir` (created fresh): write
/// input.wxs, run the command, read and validate output.wxs.
FieldSet external_step(const FieldSet& state, const ExternalParams& params,
                       const std::filesystem::path& exchange_dir);

class ExternalBackend final : public Backend {
 public:
  explicit ExternalBackend(ExternalParams params);

  FieldSet step(const FieldSet& state) override;
  const BackendDescriptor& descriptor() const noexcept override { return descriptor_; }

 private:
  BackendDescriptor descriptor_;
  std::size_t calls_ = 0;
};

/// `reference` feeds the surrogate's relaxation targets; ignored by external backends.
std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor, const VariableStats& reference);

/// Clamps relative humidity channels to [0, 100]; everything else passes through.
FieldSet clamp_physical(const FieldSet& state);

struct ForecastRun {
  BackendDescriptor backend;
  /// states[0] is the initial condition; states[k] is valid k * 6 h later.
  std::vector<FieldSet> states;

  const FieldSet& initial() const { return states.front(); }
  std::size_t steps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
};

/// Raised when a rollout stops early. `failed_step()` is the index of the state
/// that could not be produced; partial() holds states[0 .. failed_step - 1].
class RolloutError : public Error {
 public:
  RolloutError(Errc cause, const std::string& message, std::size_t failed_step,
               std::vector<FieldSet> partial, int exit_code = 0)
      : Error(cause, message),
        failed_step_(failed_step),
        partial_(std::move(partial)),
        exit_code_(exit_code) {}

  std::size_t failed_step() const noexcept { return failed_step_; }
  const std::vector<FieldSet>& partial() const noexcept { return partial_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::size_t failed_step_;
  std::vector<FieldSet> partial_;
  int exit_code_;
};

struct RolloutOptions {
  /// Apply clamp_physical() after every step.
  bool clamp = false;
};

/// Autoregressive rollout: states[k + 1] = backend.step(states[k]).
ForecastRun rollout(Backend& backend, const FieldSet& ic, std::size_t steps,
                    const RolloutOptions& options = {});

}  // namespace wxr

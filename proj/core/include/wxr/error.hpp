#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wxr {

/// Error categories surfaced by the library. Each maps to one failure class
/// that callers (and the CLI exit-code mapping) can branch on.
enum class Errc {
  InvalidArgument,
  EmptyRegion,
  IncompatibleFieldsets,
  NonFinite,
  Io,
  BadMagic,
  BadVersion,
  DimMismatch,
  CatalogMismatch,
  TruncatedPayload,
  IncompleteStats,
  DegenerateStd,
  MissingStats,
  BadDistributionSpec,
  UnknownVariable,
  NoCandidatePoints,
  UnalignedTrajectories,
  EmptyField,
  AllTrialsFailed,
  BadConfig,
  BackendProcessFailed,
  BadBackendOutput,
  BackendTimeout,
  BackendNonFinite,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// True for the error classes that originate in a forecast backend.
inline bool is_backend_error(Errc code) noexcept {
  return code == Errc::BackendProcessFailed || code == Errc::BadBackendOutput ||
         code == Errc::BackendTimeout || code == Errc::BackendNonFinite;
}

}  // namespace wxr

#pragma once

#include <stdexcept>
#include <string>

namespace dimlab {

/// Failure raised by any dimlab module. `code()` is module-qualified,
/// e.g. "codes.MalformedCode" or "core.CandidateExplosion".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr const char* kMalformedCode = "codes.MalformedCode";
inline constexpr const char* kCandidateExplosion = "core.CandidateExplosion";
inline constexpr const char* kInvalidPoint = "core.InvalidPoint";
inline constexpr const char* kInvalidBudget = "machine.InvalidBudget";
inline constexpr const char* kInvalidModel = "complexity.InvalidModel";
inline constexpr const char* kInsufficientSamples = "dimension.InsufficientSamples";
inline constexpr const char* kInvalidSchedule = "dimension.InvalidSchedule";
inline constexpr const char* kDegenerateRange = "geometry.DegenerateRange";
inline constexpr const char* kInvalidSpec = "generators.InvalidSpec";
inline constexpr const char* kNoSuchCandidate = "kakeya.NoSuchCandidate";
inline constexpr const char* kInternalInvariantViolation =
    "kakeya.InternalInvariantViolation";
inline constexpr const char* kConfigError = "cli.ConfigError";
}  // namespace errc

}  // namespace dimlab

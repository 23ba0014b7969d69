#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dyadic {

// Every failure raised by the library carries one of these kinds. The CLI maps
// them onto process exit codes (see exit_code_for).
enum class Errc {
  // corpus
  MalformedRecord,
  AlternationViolation,
  OrphanTurn,
  DuplicateStory,
  // preprocess
  MissingRectification,
  // providers
  ProviderUnavailable,
  ProviderNonDeterministic,
  CapabilityMismatch,
  DimensionDrift,
  EmptyGeneration,
  BudgetExceeded,
  TokenizerMismatch,
  // numerics / analyses
  DimensionMismatch,
  ZeroVector,
  ZeroVariance,
  LengthMismatch,
  OutOfRange,
  InsufficientPairs,
  EmptyCell,
  Unbalanced,
  RankDeficient,
  Singular,
  NotConverged,
  TooShort,
  TooFewVectors,
  EmptyWordList,
  MethodMismatch,
  BoundaryExcluded,
  EmptyTable,
  // pipeline
  ConfigInvalid,
  StageFailed,
  Io,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// One record per attempt made by with_retry.
struct Attempt {
  int number = 0;        // 1-based
  long delay_ms = 0;     // sleep performed before this attempt
  std::string failure;   // empty on success
};

class ProviderUnavailable : public Error {
 public:
  ProviderUnavailable(const std::string& what, std::vector<Attempt> attempts = {})
      : Error(Errc::ProviderUnavailable, what), attempts_(std::move(attempts)) {}

  const std::vector<Attempt>& attempts() const noexcept { return attempts_; }

 private:
  std::vector<Attempt> attempts_;
};

// Wraps a failure raised while running one pipeline stage.
class StageFailed : public Error {
 public:
  StageFailed(std::string stage, Errc cause, const std::string& what)
      : Error(Errc::StageFailed, stage + ": " + what),
        stage_(std::move(stage)),
        cause_(cause) {}

  const std::string& stage() const noexcept { return stage_; }
  Errc cause() const noexcept { return cause_; }

 private:
  std::string stage_;
  Errc cause_;
};

// 0 success, 2 config error, 3 provider error, 4 analysis error.
int exit_code_for(Errc code);

}  // namespace dyadic

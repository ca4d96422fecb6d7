#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "fuzzfeed/fuzz_input.hpp"
#include "fuzzfeed/minilang/ast.hpp"
#include "fuzzfeed/minilang/diagnostics.hpp"

namespace fuzzfeed::minilang {

inline constexpr std::uint64_t kDefaultStepLimit = 1'000'000;

struct ParseOptions {
  /// Accept a program that only defines `precondition` (candidate files).
  bool allow_missing_foo = false;
};

/// Parses source into an AST. Throws MinilangError on any diagnostic.
Program parse(std::string_view source, ParseOptions options = {});

/// Resolves names to slots and checks types. Throws MinilangError.
void typecheck(Program& program);

/// parse + typecheck, frozen behind a shared pointer.
ProgramPtr load_program(std::string_view source, ParseOptions options = {});

/// Canonical source for one function (no comments, fixed layout).
std::string print_function(const FunctionDef& fn);
std::string print_program(const Program& program);

/// Structural equality, ignoring positions, comments and layout.
bool same_function(const FunctionDef& lhs, const FunctionDef& rhs);

/// Source text for `foo` of `program` followed by `precondition_source`.
std::string attach_precondition(const Program& program, std::string_view precondition_source);

// ---------------------------------------------------------------------------
// Execution

enum class FailureKind { ExplicitThrow, IndexOutOfBounds, DivisionByZero };

std::string_view failure_kind_name(FailureKind kind);

struct Success {
  std::int32_t value = 0;
  friend bool operator==(const Success&, const Success&) = default;
};
struct Failure {
  FailureKind kind = FailureKind::ExplicitThrow;
  friend bool operator==(const Failure&, const Failure&) = default;
};
struct StepLimitExceeded {
  std::uint64_t steps = 0;
  friend bool operator==(const StepLimitExceeded&, const StepLimitExceeded&) = default;
};

using ExecOutcome = std::variant<Success, Failure, StepLimitExceeded>;

inline bool is_success_zero(const ExecOutcome& o) {
  const auto* s = std::get_if<Success>(&o);
  return s != nullptr && s->value == 0;
}
inline bool is_failure(const ExecOutcome& o) { return std::holds_alternative<Failure>(o); }
inline bool is_step_limit(const ExecOutcome& o) { return std::holds_alternative<StepLimitExceeded>(o); }

std::string describe(const ExecOutcome& outcome);

/// Runs `foo` on copies of the input arrays.
ExecOutcome run_foo(const Program& program, const FuzzInput& input,
                    std::uint64_t step_limit = kDefaultStepLimit);

/// Why a precondition evaluation was forced to false.
enum class PreconditionFault {
  ThrowInPrecondition,
  OutOfBoundsInPrecondition,
  DivisionByZeroInPrecondition,
  StepLimitInPrecondition,
};

std::string_view precondition_fault_name(PreconditionFault fault);

struct PreconditionResult {
  bool holds = false;
  std::optional<PreconditionFault> fault;
};

/// Evaluates `precondition`; runtime failures and step exhaustion yield false
/// with a fault attached. Throws MinilangError(MissingPrecondition) if absent.
PreconditionResult eval_precondition(const Program& program, const FuzzInput& input,
                                     std::uint64_t step_limit = kDefaultStepLimit);

/// The grammar shipped in docs/grammar.txt and embedded in prompts.
std::string_view grammar_text();

}  // namespace fuzzfeed::minilang

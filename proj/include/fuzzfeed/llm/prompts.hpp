#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fuzzfeed/fuzz_input.hpp"
#include "fuzzfeed/minilang/minilang.hpp"

namespace fuzzfeed::llm {

enum class PromptKind { InitialWp, RepairValidity, RepairWeakness };

std::string_view to_string(PromptKind kind);
/// Throws std::invalid_argument on an unknown name.
PromptKind prompt_kind_from_string(std::string_view name);

inline constexpr std::string_view kLanguageName = "Mini";
inline constexpr std::string_view kClosingSentence =
    "Provide no additional explanations beyond the program code and the required comment. "
    "Reason through your solution internally.";
inline constexpr std::string_view kFormatReminder =
    "Reminder: reply with the complete Mini program only (the unchanged 'foo' method followed by the "
    "'precondition' method), with no surrounding prose.";

std::string render_initial_prompt(const minilang::Program& program);

/// `candidate_source` is the full candidate program (foo + precondition).
/// `fault` notes that the candidate's precondition itself failed on the witness.
std::string render_repair_validity_prompt(const minilang::Program& program, std::string_view candidate_source,
                                          const FuzzInput& witness,
                                          std::optional<minilang::PreconditionFault> fault = std::nullopt);
std::string render_repair_weakness_prompt(const minilang::Program& program, std::string_view candidate_source,
                                          const FuzzInput& witness,
                                          std::optional<minilang::PreconditionFault> fault = std::nullopt);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view text);

}  // namespace fuzzfeed::llm

#include "fuzzfeed/llm/prompts.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include <fmt/format.h>

namespace fuzzfeed::llm {

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::InitialWp: return "initial-wp";
    case PromptKind::RepairValidity: return "repair-validity";
    case PromptKind::RepairWeakness: return "repair-weakness";
  }
  return "?";
}

PromptKind prompt_kind_from_string(std::string_view name) {
  for (auto k : {PromptKind::InitialWp, PromptKind::RepairValidity, PromptKind::RepairWeakness}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown prompt kind '" + std::string(name) + "'");
}

namespace {

std::string trimmed(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == '\n' || s.front() == '\r')) s.remove_prefix(1);
  return std::string(s);
}

std::string appendix(std::string_view program_source) {
  return fmt::format(
      "The {0} language is defined by the following grammar:\n{1}\n\nThe program follows:\n{2}\n\n{3}",
      kLanguageName, trimmed(minilang::grammar_text()), trimmed(program_source), kClosingSentence);
}

std::string fault_note(std::optional<minilang::PreconditionFault> fault) {
  if (!fault) return {};
  return fmt::format(
      "\nNote: on these inputs the current 'precondition' method itself stopped with a runtime error ({}), "
      "which is treated as returning 'false'.\n",
      minilang::precondition_fault_name(*fault));
}

}  // namespace

std::string render_initial_prompt(const minilang::Program& program) {
  return fmt::format(
      "Context: You have the following {0} program containing a method named 'foo'.\n"
      "You must determine the weakest precondition for 'foo' so that:\n"
      "    - The method's postcondition is always satisfied.\n"
      "    - No exceptions or errors are reachable.\n"
      "\n"
      "Task A: Identify this weakest precondition.\n"
      "Task B: Create a {0} method named 'precondition' that checks this weakest precondition.\n"
      "\n"
      "Adhere to the following requirements:\n"
      "    - It must accept the same arguments as 'foo'.\n"
      "    - It must return 'false' if the precondition is not satisfied and 'true' otherwise.\n"
      "    - It may include a for loop if necessary.\n"
      "    - Before this method, provide a single brief comment describing the precondition in pseudo-code.\n"
      "    - Integrate this 'precondition' method into the original {0} program and return the complete "
      "updated program.\n"
      "\n"
      "Output Format: Return only the updated {0} program (do not include any other additional text), "
      "which includes\n"
      "    - The original 'foo' method - this should be unchanged.\n"
      "    - The newly added 'precondition' method.\n"
      "\n"
      "{1}",
      kLanguageName, appendix(program.source_text));
}

std::string render_repair_validity_prompt(const minilang::Program& /*program*/, std::string_view candidate_source,
                                          const FuzzInput& witness,
                                          std::optional<minilang::PreconditionFault> fault) {
  return fmt::format(
      "You have a {0} program that contains:\n"
      "    - A method called 'foo', which may reach an error state under certain inputs.\n"
      "    - A method called 'precondition', intended to represent the weakest precondition for 'foo'.\n"
      "\n"
      "The current implementation of 'precondition' is incorrect. Specifically, there is a known set of input "
      "values for which 'precondition' returns 'true' (indicating the precondition is satisfied), but passing "
      "these same inputs to 'foo' actually triggers an error state. The aforementioned inputs follow:\n"
      "{1}\n"
      "{2}"
      "\n"
      "Task:\n"
      "    1. Analyze the existing 'foo' method and the incorrect 'precondition' method.\n"
      "    2. Determine why the current 'precondition' method fails to exclude the problematic inputs.\n"
      "    3. Rewrite or adjust 'precondition' so that it correctly represents the true weakest precondition "
      "for 'foo', ensuring that when 'precondition' returns 'true', 'foo' will not reach an error with the "
      "same inputs.\n"
      "\n"
      "Goal:\n"
      "Provide the corrected 'precondition' method so that 'foo' never encounters an error when the corrected "
      "'precondition' returns 'true'.\n"
      "\n"
      "Output Format: Return only the updated {0} program (do not include any other additional text), "
      "which includes\n"
      "    - The original 'foo' method - this should be unchanged.\n"
      "    - The corrected 'precondition' method.\n"
      "\n"
      "{3}",
      kLanguageName, to_json_string(witness), fault_note(fault), appendix(candidate_source));
}

std::string render_repair_weakness_prompt(const minilang::Program& /*program*/, std::string_view candidate_source,
                                          const FuzzInput& witness,
                                          std::optional<minilang::PreconditionFault> fault) {
  return fmt::format(
      "You have a {0} program that contains:\n"
      "    - A method called 'foo', which may reach an error state under certain inputs.\n"
      "    - A method called 'precondition', intended to represent the weakest precondition for 'foo'.\n"
      "\n"
      "The current implementation of 'precondition' is incorrect. Specifically, there is a known set of input "
      "values for which 'foo' returns successfully and 'precondition' returns 'false' - indicating that the "
      "inputs do not satisfy the given precondition, but still result in a succesful execution of 'foo'. "
      "This implies that the precondition defined by the 'precondition' method may not be weakest. "
      "The aforementioned inputs follow:\n"
      "{1}\n"
      "{2}"
      "\n"
      "Task:\n"
      "    1. Analyze the existing 'foo' method and the incorrect 'precondition' method.\n"
      "    2. Determine why the current 'precondition' method fails to correctly account for the above "
      "inputs.\n"
      "    3. Rewrite or adjust 'precondition' so that it correctly represents the true weakest precondition "
      "for 'foo'.\n"
      "\n"
      "Goal:\n"
      "Provide the corrected 'precondition' method so that 'foo' never encounters an error when the corrected "
      "'precondition' returns 'true', and that the corrected 'precondition' method truly represents the "
      "weakest precondition for 'foo'.\n"
      "\n"
      "Output Format: Return only the updated {0} program (do not include any other additional text), "
      "which includes\n"
      "    - The original 'foo' method - this should be unchanged.\n"
      "    - The corrected 'precondition' method.\n"
      "\n"
      "{3}",
      kLanguageName, to_json_string(witness), fault_note(fault), appendix(candidate_source));
}

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace fuzzfeed::llm

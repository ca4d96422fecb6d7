#include "fuzzfeed/fg/fg.hpp"

namespace fuzzfeed::fg {

std::vector<llm::TranscriptEntry> transcript_from_trace(const FgTrace& trace) {
  if (trace.events.empty() || !std::holds_alternative<RunStarted>(trace.events.front())) {
    throw std::invalid_argument("trace must start with RunStarted");
  }
  const std::string id = std::get<RunStarted>(trace.events.front()).program_id;
  std::vector<llm::TranscriptEntry> out;
  const PromptSent* pending = nullptr;
  for (const auto& e : trace.events) {
    if (const auto* p = std::get_if<PromptSent>(&e)) {
      pending = p;
    } else if (const auto* c = std::get_if<CandidateReceived>(&e); c != nullptr && pending != nullptr) {
      if (!c->provider_failed) {
        llm::TranscriptEntry t;
        t.program_id = id;
        t.prompt_kind = pending->kind;
        t.prompt_hash = pending->prompt_hash;
        t.response = c->response;
        out.push_back(std::move(t));
      }
      pending = nullptr;
    }
  }
  return out;
}

ReplayResult replay_run(const minilang::Program& program, const FgTrace& recorded, std::optional<FgConfig> config) {
  auto entries = transcript_from_trace(recorded);
  const auto& header = std::get<RunStarted>(recorded.events.front());
  FgConfig cfg = config.value_or(header.config);
  llm::ReplayProvider provider(std::move(entries), /*lenient=*/true);

  ReplayResult r;
  r.outcome = generate_wp(program, header.program_id, provider, cfg);

  const auto& want = recorded.events;
  const auto& got = r.outcome.trace.events;
  const std::size_t n = std::max(want.size(), got.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::string a = i < want.size() ? nlohmann::json(want[i]).dump() : std::string();
    std::string b = i < got.size() ? nlohmann::json(got[i]).dump() : std::string();
    if (a != b) {
      r.divergence = {true, i, std::move(a), std::move(b)};
      break;
    }
  }
  return r;
}

}  // namespace fuzzfeed::fg

#include <fstream>
#include <stdexcept>

#include "fuzzfeed/fg/fg.hpp"

namespace fuzzfeed::fg {

using nlohmann::json;

void FgConfig::validate() const {
  if (max_validity_iterations < 1) throw std::invalid_argument("max validity iterations must be at least 1");
  if (max_cycles < 1) throw std::invalid_argument("max cycles must be at least 1");
  if (fuzz_threads < 1) throw std::invalid_argument("fuzz threads must be at least 1");
  if (step_limit < 1) throw std::invalid_argument("step limit must be positive");
  budget.validate();
  generator.validate();
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Accepted: return "Accepted";
    case Outcome::ExhaustedBudget: return "ExhaustedBudget";
    case Outcome::Malformed: return "Malformed";
    case Outcome::FuzzBlind: return "FuzzBlind";
  }
  return "?";
}

Outcome outcome_from_string(std::string_view name) {
  for (auto o : {Outcome::Accepted, Outcome::ExhaustedBudget, Outcome::Malformed, Outcome::FuzzBlind}) {
    if (to_string(o) == name) return o;
  }
  throw std::invalid_argument("unknown outcome '" + std::string(name) + "'");
}

void to_json(json& j, const FgConfig& c) {
  j = json{{"max_validity_iterations", c.max_validity_iterations},
           {"max_cycles", c.max_cycles},
           {"budget", c.budget},
           {"generator", c.generator},
           {"fg_enabled", c.fg_enabled},
           {"strict_fuzz_blind", c.strict_fuzz_blind},
           {"shrink", c.shrink},
           {"step_limit", c.step_limit},
           {"model", c.model}};
}

void from_json(const json& j, FgConfig& c) {
  c.max_validity_iterations = j.at("max_validity_iterations").get<unsigned>();
  c.max_cycles = j.at("max_cycles").get<unsigned>();
  c.budget = j.at("budget").get<fuzz::FuzzBudget>();
  c.generator = j.at("generator").get<fuzz::GeneratorConfig>();
  c.fg_enabled = j.at("fg_enabled").get<bool>();
  c.strict_fuzz_blind = j.at("strict_fuzz_blind").get<bool>();
  c.shrink = j.at("shrink").get<bool>();
  c.step_limit = j.at("step_limit").get<std::uint64_t>();
  c.model = j.value("model", std::string{});
}

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json();
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

struct ToJson {
  json operator()(const RunStarted& e) const {
    return json{{"event", "RunStarted"}, {"program_id", e.program_id}, {"config", e.config}};
  }
  json operator()(const PromptSent& e) const {
    return json{{"event", "PromptSent"}, {"kind", llm::to_string(e.kind)}, {"prompt_hash", e.prompt_hash},
                {"attempt", e.attempt}};
  }
  json operator()(const CandidateReceived& e) const {
    return json{{"event", "CandidateReceived"}, {"response", e.response}, {"error", optional_json(e.error)},
                {"provider_failed", e.provider_failed}};
  }
  json operator()(const VerdictEvent& e) const {
    return json{{"event", e.phase == fuzz::Phase::Validity ? "ValidityVerdict" : "WeaknessVerdict"},
                {"cycle", e.cycle},
                {"iteration", e.iteration},
                {"passed", e.passed},
                {"seed", e.seed},
                {"stats", e.stats},
                {"witness", optional_json(e.witness)},
                {"precondition_fault", optional_json(e.precondition_fault)},
                {"vacuous", e.vacuous}};
  }
  json operator()(const RepairTriggered& e) const {
    return json{{"event", "RepairTriggered"}, {"kind", llm::to_string(e.kind)}};
  }
  json operator()(const CycleCompleted& e) const { return json{{"event", "CycleCompleted"}, {"cycle", e.cycle}}; }
  json operator()(const TerminalOutcome& e) const {
    return json{{"event", "TerminalOutcome"}, {"outcome", to_string(e.outcome)}};
  }
};

}  // namespace

std::string event_name(const Event& e) { return std::visit(ToJson{}, e).at("event").get<std::string>(); }

void to_json(json& j, const Event& e) { j = std::visit(ToJson{}, e); }

void from_json(const json& j, Event& e) {
  const std::string name = j.at("event").get<std::string>();
  if (name == "RunStarted") {
    e = RunStarted{j.at("program_id").get<std::string>(), j.at("config").get<FgConfig>()};
  } else if (name == "PromptSent") {
    e = PromptSent{llm::prompt_kind_from_string(j.at("kind").get<std::string>()), j.at("prompt_hash").get<std::string>(),
                   j.at("attempt").get<int>()};
  } else if (name == "CandidateReceived") {
    e = CandidateReceived{j.at("response").get<std::string>(), optional_from<std::string>(j, "error"),
                          j.value("provider_failed", false)};
  } else if (name == "ValidityVerdict" || name == "WeaknessVerdict") {
    VerdictEvent v;
    v.phase = name == "ValidityVerdict" ? fuzz::Phase::Validity : fuzz::Phase::Weakness;
    v.cycle = j.at("cycle").get<unsigned>();
    v.iteration = j.at("iteration").get<unsigned>();
    v.passed = j.at("passed").get<bool>();
    v.seed = j.at("seed").get<std::uint64_t>();
    v.stats = j.at("stats").get<fuzz::PhaseStats>();
    v.witness = optional_from<FuzzInput>(j, "witness");
    v.precondition_fault = optional_from<std::string>(j, "precondition_fault");
    v.vacuous = j.value("vacuous", false);
    e = v;
  } else if (name == "RepairTriggered") {
    e = RepairTriggered{llm::prompt_kind_from_string(j.at("kind").get<std::string>())};
  } else if (name == "CycleCompleted") {
    e = CycleCompleted{j.at("cycle").get<unsigned>()};
  } else if (name == "TerminalOutcome") {
    e = TerminalOutcome{outcome_from_string(j.at("outcome").get<std::string>())};
  } else {
    throw std::invalid_argument("unknown trace event '" + name + "'");
  }
}

unsigned FgTrace::cycles_used() const {
  unsigned n = 0;
  for (const auto& e : events) n += std::holds_alternative<CycleCompleted>(e);
  return n;
}

unsigned FgTrace::repairs() const {
  unsigned n = 0;
  for (const auto& e : events) n += std::holds_alternative<RepairTriggered>(e);
  return n;
}

std::uint64_t FgTrace::llm_calls() const {
  std::uint64_t n = 0;
  for (const auto& e : events) n += std::holds_alternative<PromptSent>(e);
  return n;
}

std::vector<unsigned> FgTrace::validity_iterations() const {
  std::vector<unsigned> out;
  for (const auto& e : events) {
    const auto* v = std::get_if<VerdictEvent>(&e);
    if (v == nullptr || v->phase != fuzz::Phase::Validity) continue;
    if (out.size() < v->cycle) out.resize(v->cycle, 0);
    ++out[v->cycle - 1];
  }
  return out;
}

void write_trace(const std::filesystem::path& path, const FgTrace& trace) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& e : trace.events) out << json(e).dump() << '\n';
  if (!out) throw std::runtime_error("error writing " + path.string());
}

FgTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  FgTrace t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      t.events.push_back(json::parse(line).get<Event>());
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return t;
}

}  // namespace fuzzfeed::fg

#include "fuzzfeed/fg/fg.hpp"

namespace fuzzfeed::fg {

namespace {

enum class State {
  ExpectPrompt,
  ExpectCandidate,
  AfterCandidate,
  ExpectValidity,
  AfterValidityFail,
  AfterValidityPass,
  AfterWeaknessPass,
  AfterWeaknessFail,
  ExpectAccepted,
  ExpectExhausted,
  ExpectMalformed,
  Done,
};

class Checker {
 public:
  explicit Checker(const RunStarted& header)
      : X_(header.config.max_validity_iterations),
        max_cycles_(header.config.max_cycles),
        fg_(header.config.fg_enabled),
        strict_(header.config.strict_fuzz_blind) {}

  // Empty string on success.
  std::string step(const Event& e) {
    switch (state_) {
      case State::Done: return "event after the terminal outcome";
      case State::ExpectPrompt: {
        const auto* p = std::get_if<PromptSent>(&e);
        if (p == nullptr) return "expected PromptSent";
        if (p->kind != kind_) return "expected a " + std::string(llm::to_string(kind_)) + " prompt";
        if (p->attempt != attempt_) return "unexpected prompt attempt number";
        state_ = State::ExpectCandidate;
        return {};
      }
      case State::ExpectCandidate: {
        const auto* c = std::get_if<CandidateReceived>(&e);
        if (c == nullptr) return "expected CandidateReceived";
        if (!c->error) {
          state_ = State::AfterCandidate;
        } else if (!c->provider_failed && attempt_ == 1) {
          attempt_ = 2;
          state_ = State::ExpectPrompt;
        } else {
          state_ = State::ExpectMalformed;
        }
        return {};
      }
      case State::AfterCandidate:
        if (!fg_) return terminal(e, Outcome::Accepted, State::Done);
        if (kind_ == PromptKind::RepairWeakness) {
          const auto* cc = std::get_if<CycleCompleted>(&e);
          if (cc == nullptr) return "expected CycleCompleted after a weakness repair";
          if (cc->cycle != cycle_) return "cycle number out of sequence";
          ++cycle_;
          runs_ = 0;
          state_ = State::ExpectValidity;
          return {};
        }
        state_ = State::ExpectValidity;
        return step(e);
      case State::ExpectValidity: {
        const auto* v = std::get_if<VerdictEvent>(&e);
        if (v == nullptr || v->phase != fuzz::Phase::Validity) return "expected a validity verdict";
        if (auto err = check_verdict(*v); !err.empty()) return err;
        ++runs_;
        if (runs_ > X_) return "more than X validity runs in one cycle";
        if (v->iteration != runs_) return "validity iteration number out of sequence";
        vacuous_ = v->vacuous;
        state_ = v->passed ? State::AfterValidityPass : State::AfterValidityFail;
        return {};
      }
      case State::AfterValidityFail:
        if (const auto* r = std::get_if<RepairTriggered>(&e)) {
          if (r->kind != PromptKind::RepairValidity) return "a failed validity run must trigger a validity repair";
          if (runs_ >= X_) return "more than X-1 validity repairs in one cycle";
          expect_prompt(PromptKind::RepairValidity);
          return {};
        }
        if (runs_ < X_) return "expected a validity repair";
        return terminal(e, Outcome::ExhaustedBudget, State::Done);
      case State::AfterValidityPass:
        if (const auto* v = std::get_if<VerdictEvent>(&e)) {
          if (v->phase != fuzz::Phase::Weakness) return "expected a weakness verdict";
          if (auto err = check_verdict(*v); !err.empty()) return err;
          if (v->iteration != 0) return "weakness verdicts carry iteration 0";
          state_ = v->passed ? State::AfterWeaknessPass : State::AfterWeaknessFail;
          return {};
        }
        if (!(vacuous_ && strict_)) return "expected a weakness verdict";
        return terminal(e, Outcome::FuzzBlind, State::Done);
      case State::AfterWeaknessPass:
        return cycle_completed(e, State::ExpectAccepted);
      case State::AfterWeaknessFail:
        if (const auto* r = std::get_if<RepairTriggered>(&e)) {
          if (r->kind != PromptKind::RepairWeakness) return "a failed weakness run must trigger a weakness repair";
          if (cycle_ >= max_cycles_) return "weakness repair in the last cycle";
          expect_prompt(PromptKind::RepairWeakness);
          return {};
        }
        if (cycle_ < max_cycles_) return "expected a weakness repair";
        return cycle_completed(e, State::ExpectExhausted);
      case State::ExpectAccepted: return terminal(e, Outcome::Accepted, State::Done);
      case State::ExpectExhausted: return terminal(e, Outcome::ExhaustedBudget, State::Done);
      case State::ExpectMalformed: return terminal(e, Outcome::Malformed, State::Done);
    }
    return "unreachable state";
  }

  bool done() const { return state_ == State::Done; }

 private:
  void expect_prompt(PromptKind kind) {
    kind_ = kind;
    attempt_ = 1;
    state_ = State::ExpectPrompt;
  }

  std::string terminal(const Event& e, Outcome expected, State next) {
    const auto* t = std::get_if<TerminalOutcome>(&e);
    if (t == nullptr) return "expected TerminalOutcome(" + std::string(to_string(expected)) + ")";
    if (t->outcome != expected) {
      return "illegal outcome " + std::string(to_string(t->outcome)) + ", expected " + std::string(to_string(expected));
    }
    state_ = next;
    return {};
  }

  std::string cycle_completed(const Event& e, State next) {
    const auto* cc = std::get_if<CycleCompleted>(&e);
    if (cc == nullptr) return "expected CycleCompleted";
    if (cc->cycle != cycle_) return "cycle number out of sequence";
    state_ = next;
    return {};
  }

  std::string check_verdict(const VerdictEvent& v) const {
    if (!fg_) return "fuzz verdict in a zero-shot run";
    if (v.cycle != cycle_) return "verdict cycle number out of sequence";
    if (v.passed == v.witness.has_value()) return "a verdict has a witness exactly when it fails";
    bool vacuous = v.phase == fuzz::Phase::Validity && v.passed && v.stats.trials >= kFuzzBlindMinTrials &&
                   v.stats.precondition_true == 0;
    if (v.vacuous != vacuous) return "vacuous flag disagrees with the phase statistics";
    return {};
  }

  unsigned X_;
  unsigned max_cycles_;
  bool fg_;
  bool strict_;
  State state_ = State::ExpectPrompt;
  PromptKind kind_ = PromptKind::InitialWp;
  int attempt_ = 1;
  unsigned cycle_ = 1;
  unsigned runs_ = 0;
  bool vacuous_ = false;
};

}  // namespace

TraceCheck validate_trace(const std::vector<Event>& events) {
  if (events.empty()) return {false, 0, "empty trace"};
  const auto* header = std::get_if<RunStarted>(&events.front());
  if (header == nullptr) return {false, 0, "trace must start with RunStarted"};
  if (header->config.max_validity_iterations < 1 || header->config.max_cycles < 1) {
    return {false, 0, "header budgets must be at least 1"};
  }
  Checker checker(*header);
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (std::holds_alternative<RunStarted>(events[i])) return {false, i, "repeated RunStarted"};
    if (auto err = checker.step(events[i]); !err.empty()) return {false, i, err};
  }
  if (!checker.done()) return {false, events.size(), "trace ends without a terminal outcome"};
  return {};
}

}  // namespace fuzzfeed::fg

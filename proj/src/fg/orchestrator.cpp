#include "fuzzfeed/fg/fg.hpp"

namespace fuzzfeed::fg {

namespace {

using fuzz::Phase;

class Run {
 public:
  Run(const minilang::Program& program, const std::string& id, llm::ChatProvider& provider, const FgConfig& config)
      : program_(program), id_(id), provider_(provider), config_(config) {
    config_.validate();
    emit(RunStarted{id_, config_});
  }

  // Sends one prompt, with a single re-ask when extraction fails.
  std::optional<llm::CandidateWp> ask(PromptKind kind, const std::string& prompt) {
    for (int attempt = 1; attempt <= 2; ++attempt) {
      std::string text = attempt == 1 ? prompt : prompt + "\n\n" + std::string(llm::kFormatReminder);
      llm::RequestContext ctx{id_, kind, llm::sha256_hex(text), attempt};
      emit(PromptSent{kind, ctx.prompt_hash, attempt});
      llm::ChatExchange ex;
      try {
        ex = provider_.complete(ctx, llm::make_request(std::move(text), config_.model));
      } catch (const llm::ProviderError& e) {
        emit(CandidateReceived{"", std::string(llm::to_string(e.kind())) + ": " + e.what(), true});
        return std::nullopt;
      }
      try {
        auto c = llm::extract_candidate(ex.response.text, program_);
        emit(CandidateReceived{ex.response.text, std::nullopt, false});
        return c;
      } catch (const llm::ExtractionError& e) {
        emit(CandidateReceived{ex.response.text, std::string(llm::to_string(e.kind())) + ": " + e.what(), false});
      }
    }
    return std::nullopt;
  }

  VerdictEvent fuzz_phase(const llm::CandidateWp& candidate, Phase phase, unsigned cycle, unsigned iteration) {
    fuzz::FuzzOptions opts;
    opts.budget = config_.budget;
    opts.generator = config_.generator;
    opts.generator.seed = fuzz::mix_seed(config_.generator.seed, phase_counter_++);
    opts.step_limit = config_.step_limit;
    opts.shrink = config_.shrink;
    opts.threads = config_.fuzz_threads;
    auto v = fuzz::run_phase(*candidate.program, phase, opts);

    VerdictEvent ev;
    ev.phase = phase;
    ev.cycle = cycle;
    ev.iteration = iteration;
    ev.passed = !v.counterexample;
    ev.seed = opts.generator.seed;
    ev.stats = v.stats;
    last_fault_.reset();
    if (v.counterexample) {
      ev.witness = v.witness;
      last_fault_ = minilang::eval_precondition(*candidate.program, v.witness, config_.step_limit).fault;
      if (last_fault_) ev.precondition_fault = std::string(minilang::precondition_fault_name(*last_fault_));
    }
    ev.vacuous = phase == Phase::Validity && ev.passed && v.stats.trials >= kFuzzBlindMinTrials &&
                 v.stats.precondition_true == 0;
    emit(ev);
    return ev;
  }

  WpOutcome finish(Outcome outcome, std::optional<llm::CandidateWp> candidate) {
    emit(TerminalOutcome{outcome});
    WpOutcome out;
    out.kind = outcome;
    out.candidate = std::move(candidate);
    out.trace = std::move(trace_);
    return out;
  }

  std::optional<minilang::PreconditionFault> last_fault() const { return last_fault_; }
  const FgConfig& config() const { return config_; }
  void emit(Event e) { trace_.events.push_back(std::move(e)); }

 private:
  const minilang::Program& program_;
  std::string id_;
  llm::ChatProvider& provider_;
  FgConfig config_;
  FgTrace trace_;
  std::uint64_t phase_counter_ = 0;
  std::optional<minilang::PreconditionFault> last_fault_;
};

}  // namespace

WpOutcome zero_shot(const minilang::Program& program, const std::string& program_id, llm::ChatProvider& provider,
                    const FgConfig& config) {
  FgConfig c = config;
  c.fg_enabled = false;
  Run run(program, program_id, provider, c);
  auto candidate = run.ask(PromptKind::InitialWp, llm::render_initial_prompt(program));
  if (!candidate) return run.finish(Outcome::Malformed, std::nullopt);
  return run.finish(Outcome::Accepted, std::move(candidate));
}

WpOutcome fg_generate(const minilang::Program& program, const std::string& program_id, llm::ChatProvider& provider,
                      const FgConfig& config) {
  FgConfig c = config;
  c.fg_enabled = true;
  Run run(program, program_id, provider, c);
  const unsigned X = c.max_validity_iterations;

  auto candidate = run.ask(PromptKind::InitialWp, llm::render_initial_prompt(program));
  if (!candidate) return run.finish(Outcome::Malformed, std::nullopt);
  std::optional<llm::CandidateWp> best_valid;

  for (unsigned cycle = 1; cycle <= c.max_cycles; ++cycle) {
    bool valid = false;
    for (unsigned iter = 1; iter <= X; ++iter) {
      auto v = run.fuzz_phase(*candidate, Phase::Validity, cycle, iter);
      if (v.passed) {
        if (v.vacuous && c.strict_fuzz_blind) return run.finish(Outcome::FuzzBlind, candidate);
        valid = true;
        best_valid = candidate;
        break;
      }
      if (iter == X) break;
      run.emit(RepairTriggered{PromptKind::RepairValidity});
      candidate = run.ask(PromptKind::RepairValidity,
                          llm::render_repair_validity_prompt(program, candidate->source, *v.witness, run.last_fault()));
      if (!candidate) return run.finish(Outcome::Malformed, std::nullopt);
    }
    if (!valid) return run.finish(Outcome::ExhaustedBudget, best_valid ? best_valid : candidate);

    auto w = run.fuzz_phase(*candidate, Phase::Weakness, cycle, 0);
    if (w.passed) {
      run.emit(CycleCompleted{cycle});
      return run.finish(Outcome::Accepted, candidate);
    }
    if (cycle == c.max_cycles) {
      run.emit(CycleCompleted{cycle});
      break;
    }
    run.emit(RepairTriggered{PromptKind::RepairWeakness});
    candidate = run.ask(PromptKind::RepairWeakness,
                        llm::render_repair_weakness_prompt(program, candidate->source, *w.witness, run.last_fault()));
    if (!candidate) return run.finish(Outcome::Malformed, std::nullopt);
    run.emit(CycleCompleted{cycle});
  }
  return run.finish(Outcome::ExhaustedBudget, best_valid ? best_valid : candidate);
}

WpOutcome generate_wp(const minilang::Program& program, const std::string& program_id, llm::ChatProvider& provider,
                      const FgConfig& config) {
  return config.fg_enabled ? fg_generate(program, program_id, provider, config)
                           : zero_shot(program, program_id, provider, config);
}

}  // namespace fuzzfeed::fg

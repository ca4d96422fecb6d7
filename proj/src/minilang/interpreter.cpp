#include <algorithm>
#include <cstdint>
#include <vector>

#include "fuzzfeed/minilang/minilang.hpp"

namespace fuzzfeed::minilang {

namespace {

// 32-bit two's-complement arithmetic without signed-overflow UB.
inline std::int32_t wrap_add(std::int32_t x, std::int32_t y) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(x) + static_cast<std::uint32_t>(y));
}
inline std::int32_t wrap_sub(std::int32_t x, std::int32_t y) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(x) - static_cast<std::uint32_t>(y));
}
inline std::int32_t wrap_mul(std::int32_t x, std::int32_t y) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(x) * static_cast<std::uint32_t>(y));
}

// Java's Arrays.binarySearch, so results on unsorted input are still deterministic.
std::int32_t java_binary_search(const std::vector<std::int32_t>& xs, std::int32_t key) {
  std::int32_t low = 0;
  std::int32_t high = static_cast<std::int32_t>(xs.size()) - 1;
  while (low <= high) {
    std::int32_t mid = static_cast<std::int32_t>((static_cast<std::uint32_t>(low) + static_cast<std::uint32_t>(high)) >> 1);
    std::int32_t v = xs[static_cast<std::size_t>(mid)];
    if (v < key) {
      low = mid + 1;
    } else if (v > key) {
      high = mid - 1;
    } else {
      return mid;
    }
  }
  return -(low + 1);
}

class Machine {
 public:
  Machine(const FunctionDef& fn, const FuzzInput& input, std::uint64_t step_limit)
      : fn_(fn), limit_(step_limit) {
    slots_.assign(static_cast<std::size_t>(fn.slot_count), 0);
    heap_.reserve(8);
    heap_.push_back(input.a);
    heap_.push_back(input.b);
    heap_.push_back(input.c);
    for (int i = 0; i < 3; ++i) slots_[static_cast<std::size_t>(i)] = i;
  }

  ExecOutcome run() {
    switch (exec_block(fn_.body)) {
      case Flow::Return: return Success{ret_};
      case Flow::Fault: return Failure{fault_};
      case Flow::Limit: return StepLimitExceeded{steps_};
      case Flow::Normal: break;
    }
    // Unreachable for typechecked programs.
    return Failure{FailureKind::ExplicitThrow};
  }

 private:
  enum class Flow : std::uint8_t { Normal, Return, Fault, Limit };

  bool tick() { return ++steps_ > limit_; }

  void raise(FailureKind kind) {
    if (!faulted_) {
      faulted_ = true;
      fault_ = kind;
    }
  }

  std::vector<std::int32_t>& array(int slot) {
    return heap_[static_cast<std::size_t>(slots_[static_cast<std::size_t>(slot)])];
  }

  std::int32_t eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit: return e.value;
      case ExprKind::Var: return slots_[static_cast<std::size_t>(e.slot)];
      case ExprKind::Index: {
        std::int32_t i = eval(*e.lhs);
        const auto& xs = array(e.slot);
        if (faulted_) return 0;
        if (i < 0 || static_cast<std::size_t>(i) >= xs.size()) {
          raise(FailureKind::IndexOutOfBounds);
          return 0;
        }
        return xs[static_cast<std::size_t>(i)];
      }
      case ExprKind::Len: return static_cast<std::int32_t>(array(e.slot).size());
      case ExprKind::Sort: {
        auto& xs = array(e.slot);
        std::sort(xs.begin(), xs.end());
        return 0;
      }
      case ExprKind::Clone: {
        std::vector<std::int32_t> copy = array(e.slot);
        heap_.push_back(std::move(copy));
        return static_cast<std::int32_t>(heap_.size() - 1);
      }
      case ExprKind::BinarySearch: {
        std::int32_t key = eval(*e.lhs);
        if (faulted_) return 0;
        return java_binary_search(array(e.slot), key);
      }
      case ExprKind::Unary: {
        std::int32_t v = eval(*e.lhs);
        return e.unary_op == UnaryOp::Neg ? wrap_sub(0, v) : static_cast<std::int32_t>(v == 0);
      }
      case ExprKind::Binary: return eval_binary(e);
    }
    return 0;
  }

  std::int32_t eval_binary(const Expr& e) {
    if (e.binary_op == BinaryOp::And) {
      std::int32_t l = eval(*e.lhs);
      if (faulted_ || l == 0) return 0;
      return eval(*e.rhs) != 0;
    }
    if (e.binary_op == BinaryOp::Or) {
      std::int32_t l = eval(*e.lhs);
      if (faulted_) return 0;
      if (l != 0) return 1;
      return eval(*e.rhs) != 0;
    }
    std::int32_t l = eval(*e.lhs);
    std::int32_t r = eval(*e.rhs);
    if (faulted_) return 0;
    switch (e.binary_op) {
      case BinaryOp::Add: return wrap_add(l, r);
      case BinaryOp::Sub: return wrap_sub(l, r);
      case BinaryOp::Mul: return wrap_mul(l, r);
      case BinaryOp::Div:
        if (r == 0) {
          raise(FailureKind::DivisionByZero);
          return 0;
        }
        if (l == INT32_MIN && r == -1) return INT32_MIN;
        return l / r;
      case BinaryOp::Mod:
        if (r == 0) {
          raise(FailureKind::DivisionByZero);
          return 0;
        }
        if (r == -1) return 0;
        return l % r;
      case BinaryOp::Lt: return l < r;
      case BinaryOp::Le: return l <= r;
      case BinaryOp::Gt: return l > r;
      case BinaryOp::Ge: return l >= r;
      case BinaryOp::Eq: return l == r;
      case BinaryOp::Ne: return l != r;
      default: return 0;
    }
  }

  Flow exec_block(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) {
      Flow f = exec(s);
      if (f != Flow::Normal) return f;
    }
    return Flow::Normal;
  }

  // Evaluates a loop condition, charging one step.
  Flow test(const Expr& cond, bool& holds) {
    if (tick()) return Flow::Limit;
    holds = eval(cond) != 0;
    return faulted_ ? Flow::Fault : Flow::Normal;
  }

  Flow exec(const Stmt& s) {
    if (tick()) return Flow::Limit;
    switch (s.kind) {
      case StmtKind::Decl:
      case StmtKind::Assign: {
        std::int32_t v = eval(*s.value);
        if (faulted_) return Flow::Fault;
        slots_[static_cast<std::size_t>(s.slot)] = v;
        return Flow::Normal;
      }
      case StmtKind::IndexAssign: {
        std::int32_t i = eval(*s.index);
        std::int32_t v = eval(*s.value);
        if (faulted_) return Flow::Fault;
        auto& xs = array(s.slot);
        if (i < 0 || static_cast<std::size_t>(i) >= xs.size()) {
          raise(FailureKind::IndexOutOfBounds);
          return Flow::Fault;
        }
        xs[static_cast<std::size_t>(i)] = v;
        return Flow::Normal;
      }
      case StmtKind::ExprStmt:
        eval(*s.value);
        return faulted_ ? Flow::Fault : Flow::Normal;
      case StmtKind::While:
        for (;;) {
          bool holds = false;
          if (Flow f = test(*s.cond, holds); f != Flow::Normal) return f;
          if (!holds) return Flow::Normal;
          if (Flow f = exec_block(s.body); f != Flow::Normal) return f;
        }
      case StmtKind::For:
        if (s.init) {
          if (Flow f = exec(*s.init); f != Flow::Normal) return f;
        }
        for (;;) {
          bool holds = false;
          if (Flow f = test(*s.cond, holds); f != Flow::Normal) return f;
          if (!holds) return Flow::Normal;
          if (Flow f = exec_block(s.body); f != Flow::Normal) return f;
          if (s.update) {
            if (Flow f = exec(*s.update); f != Flow::Normal) return f;
          }
        }
      case StmtKind::If: {
        std::int32_t c = eval(*s.cond);
        if (faulted_) return Flow::Fault;
        if (c != 0) return exec_block(s.body);
        return s.has_else ? exec_block(s.else_body) : Flow::Normal;
      }
      case StmtKind::Throw: raise(FailureKind::ExplicitThrow); return Flow::Fault;
      case StmtKind::Return:
        ret_ = eval(*s.value);
        return faulted_ ? Flow::Fault : Flow::Return;
    }
    return Flow::Normal;
  }

  const FunctionDef& fn_;
  std::vector<std::int32_t> slots_;
  std::vector<std::vector<std::int32_t>> heap_;
  std::uint64_t steps_ = 0;
  std::uint64_t limit_;
  bool faulted_ = false;
  FailureKind fault_ = FailureKind::ExplicitThrow;
  std::int32_t ret_ = 0;
};

void require_typechecked(const Program& program) {
  if (!program.typechecked) {
    throw std::logic_error("program must be typechecked before execution");
  }
}

}  // namespace

ExecOutcome run_foo(const Program& program, const FuzzInput& input, std::uint64_t step_limit) {
  require_typechecked(program);
  return Machine(program.foo(), input, step_limit).run();
}

PreconditionResult eval_precondition(const Program& program, const FuzzInput& input,
                                     std::uint64_t step_limit) {
  require_typechecked(program);
  const FunctionDef* fn = program.precondition();
  if (fn == nullptr) {
    throw MinilangError(ErrorKind::MissingPrecondition, SourcePos{}, "program does not define 'precondition'");
  }
  ExecOutcome out = Machine(*fn, input, step_limit).run();
  if (const auto* s = std::get_if<Success>(&out)) return {s->value != 0, std::nullopt};
  if (std::holds_alternative<StepLimitExceeded>(out)) {
    return {false, PreconditionFault::StepLimitInPrecondition};
  }
  switch (std::get<Failure>(out).kind) {
    case FailureKind::ExplicitThrow: return {false, PreconditionFault::ThrowInPrecondition};
    case FailureKind::IndexOutOfBounds: return {false, PreconditionFault::OutOfBoundsInPrecondition};
    case FailureKind::DivisionByZero: return {false, PreconditionFault::DivisionByZeroInPrecondition};
  }
  return {false, PreconditionFault::ThrowInPrecondition};
}

std::string_view failure_kind_name(FailureKind kind) {
  switch (kind) {
    case FailureKind::ExplicitThrow: return "ExplicitThrow";
    case FailureKind::IndexOutOfBounds: return "IndexOutOfBounds";
    case FailureKind::DivisionByZero: return "DivisionByZero";
  }
  return "?";
}

std::string_view precondition_fault_name(PreconditionFault fault) {
  switch (fault) {
    case PreconditionFault::ThrowInPrecondition: return "ThrowInPrecondition";
    case PreconditionFault::OutOfBoundsInPrecondition: return "OutOfBoundsInPrecondition";
    case PreconditionFault::DivisionByZeroInPrecondition: return "DivisionByZeroInPrecondition";
    case PreconditionFault::StepLimitInPrecondition: return "StepLimitInPrecondition";
  }
  return "?";
}

std::string describe(const ExecOutcome& outcome) {
  if (const auto* s = std::get_if<Success>(&outcome)) return "Success(" + std::to_string(s->value) + ")";
  if (const auto* f = std::get_if<Failure>(&outcome)) {
    return "Failure(" + std::string(failure_kind_name(f->kind)) + ")";
  }
  return "StepLimitExceeded(" + std::to_string(std::get<StepLimitExceeded>(outcome).steps) + ")";
}

}  // namespace fuzzfeed::minilang

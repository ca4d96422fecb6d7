#pragma once

#include <ostream>

namespace fuzzfeed::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCounterexample = 1;  // check, corpus-validate, replay, validate-trace
inline constexpr int kExitMalformed = 2;
inline constexpr int kExitExhausted = 3;       // ExhaustedBudget or FuzzBlind
inline constexpr int kExitConfig = 4;

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fuzzfeed::cli

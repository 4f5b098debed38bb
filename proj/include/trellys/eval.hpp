#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trellys/syntax.hpp"

// Deterministic call-by-value small-step evaluation of unannotated terms.
// Values (including variables) are terminal; abort is terminal; a redex that
// matches no rule yields Stuck, which run reports rather than throws.

namespace trellys {

inline constexpr std::uint64_t kDefaultFuel = 1'000'000;
inline constexpr std::int64_t kDefaultJoinSteps = 100;

struct StepResult {
  enum class Kind { Stepped, IsValue, IsAbort, Stuck };
  Kind kind;
  UPtr next;                // set when Stepped
  std::string stuck_reason; // set when Stuck: the offending redex
};

StepResult step(const UPtr& m);

enum class Outcome { Value, Abort, OutOfFuel, Stuck };

struct RunResult {
  UPtr final;
  Outcome outcome;
  std::uint64_t steps;
  std::string stuck_reason;
};

RunResult run(const UPtr& m, std::uint64_t fuel = kDefaultFuel);

// Run m for at most i steps and n for at most j steps (stopping early at
// values, abort, or stuck states) and compare the frontier terms up to alpha.
bool cbv_join(const UPtr& m, const UPtr& n, std::int64_t i, std::int64_t j);

// All intermediate terms of a bounded run, starting with m itself.
std::vector<UPtr> trace(const UPtr& m, std::uint64_t fuel, RunResult& result);

}  // namespace trellys

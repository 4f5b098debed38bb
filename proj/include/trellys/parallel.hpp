#pragma once

#include <stdexcept>
#include <vector>

#include "trellys/syntax.hpp"

// Nondeterministic CBV parallel reduction as a reduct enumerator, plus the
// bounded joinability oracle and the one-step diamond checker. Beta steps
// fire only at value arguments/scrutinees (variables count as values); full
// congruence applies under every binder. Enumeration is exponential, so terms
// and reduct sets are capped.

namespace trellys {

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kMaxParallelNodes = 40;
inline constexpr std::size_t kMaxReducts = 10'000;

// The exact one-step reduct set {m' | m ~>p m'}, deduplicated up to alpha
// (includes m itself). Throws BudgetExceeded on oversized inputs or sets.
std::vector<UPtr> parallel_reducts(const UPtr& m);

// Every term reachable in at most depth parallel steps, deduplicated.
std::vector<UPtr> reachable(const UPtr& m, int depth);

// Whether the depth-bounded reachable sets of m and n intersect.
bool joinable(const UPtr& m, const UPtr& n, int depth);

struct DiamondResult {
  bool ok;
  UPtr m1, m2;  // counterexample pair when !ok
};

DiamondResult diamond_check(const UPtr& m);

}  // namespace trellys

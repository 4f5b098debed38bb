#include "doctest.h"
#include "trellys/eval.hpp"
#include "trellys/meta.hpp"
#include "trellys/parallel.hpp"
#include "trellys/prelude.hpp"
#include "trellys/surface.hpp"
#include "trellys/typecheck.hpp"

using namespace trellys;

namespace {

UPtr nat(int n) {
  UPtr acc = u_dcon("Z");
  for (int i = 0; i < n; ++i) acc = u_dcon("S", {{acc}});
  return acc;
}

UPtr erased(const std::string& src) {
  Registry r = registry_of(prelude());
  Checker ck(prelude());
  return ck.unfold(erase(parse_expr(src, r)));
}

bool contains(const std::vector<UPtr>& set, const UPtr& t) {
  std::string key = ukey(t);
  for (auto& s : set)
    if (ukey(s) == key) return true;
  return false;
}

}  // namespace

TEST_CASE("reducts include reflexivity") {
  CHECK(contains(parallel_reducts(nat(0)), nat(0)));
  CHECK(parallel_reducts(nat(0)).size() == 1);
}

TEST_CASE("beta fires on variable arguments") {
  UPtr t = u_app(u_lam("x", u_tcon("Bool")), u_var("x"));
  CHECK(contains(parallel_reducts(t), u_tcon("Bool")));
}

TEST_CASE("reduction goes under binders") {
  // \x . (\a . S (S a)) 0 steps to \x . 2 even though the lambda is a value
  UPtr add2 = u_lam("a", u_dcon("S", {{u_dcon("S", {{u_var("a")}})}}));
  UPtr t = u_lam("x", u_app(add2, nat(0)));
  CHECK(contains(parallel_reducts(t), u_lam("x", nat(2))));
  // under a rec binder too
  UPtr r = u_rec("f", u_lam("x", u_app(add2, nat(0))));
  CHECK(contains(parallel_reducts(r), u_rec("f", u_lam("x", nat(2)))));
}

TEST_CASE("plus unfolds on a variable argument") {
  CHECK(joinable(erased("plus 0 x"), u_var("x"), 3));
}

TEST_CASE("different head constructors never join") {
  for (int k = 0; k <= 4; ++k)
    CHECK(!joinable(u_tcon("Bool"), u_tcon("Nat"), k));
}

TEST_CASE("abort does not escape from equations") {
  UPtr t = u_eq(u_abort(), nat(0));
  for (auto& r : parallel_reducts(t)) CHECK(as<UEq>(r));
}

TEST_CASE("head constructors are preserved (property)") {
  // The one exception is the abort collapse itself: a constructor whose
  // evaluation position holds abort steps to abort, which has no head.
  Gen g(prelude(), {51});
  for (int i = 0; i < 200; ++i) {
    UPtr t = g.gen_uexpr(10);
    auto h = head_constructor(t);
    if (!h) continue;
    try {
      for (auto& r : parallel_reducts(t)) {
        if (as<UAbort>(r)) continue;
        CHECK(head_constructor(r) == h);
      }
    } catch (const BudgetExceeded&) {
    }
  }
}

TEST_CASE("head constructors survive full cbv runs (property)") {
  Gen g(prelude(), {52, 14});
  int done = 0;
  for (int i = 0; i < 200 && done < 100; ++i) {
    auto t = g.gen_welltyped(g.gen_type());
    if (!t) continue;
    ++done;
    UPtr m = erase(*t);
    auto h = head_constructor(m);
    if (!h) continue;
    for (int s = 0; s < 200; ++s) {
      StepResult r = step(m);
      if (r.kind != StepResult::Kind::Stepped) break;
      m = r.next;
      if (as<UAbort>(m)) break;  // terminal error exit
      CHECK(head_constructor(m) == h);
    }
  }
}

TEST_CASE("diamond on the classic beta overlap") {
  // ((\x . m0) u) where both the body and the argument can step
  UPtr m0 = u_app(u_lam("y", u_var("y")), u_var("x"));
  UPtr u = u_app(u_lam("z", nat(1)), nat(0));
  // u is not a value, so only congruence applies at the top; force a value:
  UPtr t = u_app(u_lam("x", m0), nat(2));
  CHECK(diamond_check(t).ok);
  CHECK(diamond_check(u_app(u_lam("x", m0), u)).ok);
  CHECK(diamond_check(nat(0)).ok);
}

TEST_CASE("diamond property on random terms") {
  SuiteReport rep = diamond_suite(300, 99);
  CHECK(rep.failed == 0);
  CHECK(rep.passed > 0);
}

TEST_CASE("substitution lemmas for parallel reduction") {
  SuiteReport rep = subst_lemma_suite(200, 77);
  CHECK(rep.failed == 0);
  CHECK(rep.passed > 0);
}

TEST_CASE("joinability is injective for arrows (small instances)") {
  // P0 reduces to P1 in one layer; their domains must join too
  UPtr dom0 = u_app(u_lam("y", u_tcon("Nat")), nat(0));
  UPtr p0 = u_pi("x", dom0, u_tcon("Bool"));
  UPtr p1 = u_pi("x", u_tcon("Nat"), u_tcon("Bool"));
  int k = 1;
  REQUIRE(joinable(p0, p1, k));
  CHECK(joinable(dom0, u_tcon("Nat"), 2 * k));
}

TEST_CASE("budget limits are enforced") {
  UPtr big = nat(45);  // well past the node cap
  CHECK(node_count(big) > kMaxParallelNodes);
  CHECK_THROWS_AS(parallel_reducts(big), BudgetExceeded);
}

TEST_CASE("joinable is reflexive at depth zero") {
  Gen g(prelude(), {53});
  for (int i = 0; i < 50; ++i) {
    UPtr t = g.gen_uexpr(8);
    CHECK(joinable(t, t, 0));
  }
}

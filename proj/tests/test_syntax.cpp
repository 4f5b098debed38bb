#include "doctest.h"
#include "trellys/erasure.hpp"
#include "trellys/meta.hpp"
#include "trellys/prelude.hpp"
#include "trellys/syntax.hpp"

using namespace trellys;

namespace {

UPtr nat(int n) {
  UPtr acc = u_dcon("Z");
  for (int i = 0; i < n; ++i) acc = u_dcon("S", {{acc}});
  return acc;
}

}  // namespace

TEST_CASE("substitution hits free variables and respects shadowing") {
  CHECK(alpha_eq(subst(u_var("x"), "x", nat(0)), nat(0)));
  // shadowed occurrence untouched
  UPtr shadowed = u_lam("x", u_var("x"));
  CHECK(alpha_eq(subst(shadowed, "x", nat(0)), shadowed));
}

TEST_CASE("substitution avoids capture") {
  // (\y . x)[x := y]  ~  \y' . y
  UPtr t = u_lam("y", u_var("x"));
  UPtr r = subst(t, "x", u_var("y"));
  CHECK(alpha_eq(r, u_lam("q", u_var("y"))));
  CHECK(!alpha_eq(r, u_lam("y", u_var("y"))));
}

TEST_CASE("substituting abort for a beta argument") {
  // ((\x . Bool) x)[x := abort]  ~  (\x' . Bool) abort
  UPtr t = u_app(u_lam("x", u_tcon("Bool")), u_var("x"));
  UPtr r = subst(t, "x", u_abort());
  CHECK(alpha_eq(r, u_app(u_lam("z", u_tcon("Bool")), u_abort())));
}

TEST_CASE("alpha equivalence of binders") {
  CHECK(alpha_eq(u_lam("x", u_var("x")), u_lam("y", u_var("y"))));
  CHECK(!alpha_eq(u_lam("x", u_var("x")), u_lam("x", nat(0))));
  UPtr r1 = u_rec("f", u_lam("x", u_app(u_var("f"), u_var("x"))));
  UPtr r2 = u_rec("g", u_lam("y", u_app(u_var("g"), u_var("y"))));
  CHECK(alpha_eq(r1, r2));
}

TEST_CASE("free variables") {
  auto fv = free_vars(u_lam("x", u_app(u_var("x"), u_var("y"))));
  CHECK(fv == std::set<Name>{"y"});
  // an erased irrelevant lambda binds nothing
  CHECK(free_vars(u_ilam(u_var("m"))) == std::set<Name>{"m"});
}

TEST_CASE("erasing an irrelevant binder removes it from the free variables") {
  // \[x : Nat] . plus 1 (conv true at ~p) erases to \[] . plus 1 true
  APtr body = a_app(
      a_app(a_var("plus"),
            a_dcon("S", {}, {{a_dcon("Z"), Relevance::Relevant}})),
      a_conv(a_dcon("true"), {{a_var("p"), nullptr, nullptr}}, {"#1"},
             a_var("#1")));
  APtr lam = a_lam("x", a_tcon("Nat"), body, Relevance::Irrelevant);
  auto fv = free_vars(erase(lam));
  CHECK(fv.count("plus") == 1);
  CHECK(fv.count("x") == 0);
  CHECK(fv.count("p") == 0);
  // the annotated term does mention p
  CHECK(free_vars(lam).count("p") == 1);
}

TEST_CASE("value predicate") {
  CHECK(is_value(u_var("x")));  // variables are values
  CHECK(!is_value(u_abort()));
  CHECK(!is_value(u_dcon("d", {{nat(0)}, {u_abort()}})));
  CHECK(is_value(u_dcon("d", {{nat(0)}, {nullptr}})));  // placeholders fine
  CHECK(is_value(u_eq(u_abort(), u_abort())));          // equations are values
  CHECK(is_value(u_rec("f", u_lam("x", u_var("x")))));
  CHECK(!is_value(u_rec("f", u_app(u_var("f"), nat(0)))));
  CHECK(is_value(u_pi("x", u_app(nat(0), nat(0)), u_tcon("Nat"))));
}

TEST_CASE("annotated value predicate mirrors the grammar") {
  CHECK(is_value(a_var("x")));
  CHECK(!is_value(a_abort(a_tcon("Nat"))));
  CHECK(is_value(a_join(a_var("a"), a_var("b"), 1, 2)));
  CHECK(is_value(a_conv(a_var("v"), {}, {}, a_tcon("Nat"))));
  CHECK(
      !is_value(a_conv(a_app(a_var("f"), a_var("x")), {}, {}, a_tcon("Nat"))));
}

TEST_CASE("head constructors") {
  CHECK(head_constructor(u_pi("x", u_var("M"), u_var("N"))) ==
        std::optional<std::string>("->"));
  CHECK(head_constructor(
            u_pi("x", u_var("M"), u_var("N"), Relevance::Irrelevant)) ==
        std::optional<std::string>("[]->"));
  CHECK(head_constructor(u_lam("x", u_var("x"))) == std::nullopt);
  CHECK(head_constructor(u_eq(u_var("m"), u_var("n"))) ==
        std::optional<std::string>("="));
  CHECK(head_constructor(u_star()) == std::optional<std::string>("*"));
  CHECK(head_constructor(u_tcon("Vec", {u_tcon("Nat")})) ==
        std::optional<std::string>("Vec"));
  CHECK(head_constructor(u_dcon("S", {{nat(0)}})) ==
        std::optional<std::string>("S"));
}

TEST_CASE("subst free-variable bound (property)") {
  Gen g(prelude(), {11});
  for (int i = 0; i < 200; ++i) {
    UPtr e = g.gen_uexpr(10);
    UPtr v = g.gen_uexpr(6);
    auto before = free_vars(e);
    auto vfv = free_vars(v);
    auto after = free_vars(subst(e, "a", v));
    for (auto& n : after) {
      bool allowed = (before.count(n) && n != "a") || vfv.count(n);
      CHECK(allowed);
    }
  }
}

TEST_CASE("alpha equivalence is a congruence for substitution (property)") {
  Gen g(prelude(), {12});
  for (int i = 0; i < 200; ++i) {
    UPtr body = g.gen_uexpr(8);
    UPtr e1 = u_lam("q1", subst(body, "a", u_var("q1")));
    UPtr e2 = u_lam("q2", subst(body, "a", u_var("q2")));
    REQUIRE(alpha_eq(e1, e2));
    UPtr v = g.gen_uexpr(5);
    CHECK(alpha_eq(subst(e1, "b", v), subst(e2, "b", v)));
  }
}

TEST_CASE("substituting a value into a value yields a value (property)") {
  Gen g(prelude(), {13});
  int seen = 0;
  for (int i = 0; i < 400 && seen < 100; ++i) {
    UPtr u = g.gen_uexpr(8);
    UPtr w = g.gen_uexpr(6);
    if (!is_value(u) || !is_value(w)) continue;
    ++seen;
    CHECK(is_value(subst(u, "a", w)));
  }
  CHECK(seen >= 50);
}

TEST_CASE("ukey separates terms exactly up to alpha") {
  Gen g(prelude(), {14});
  for (int i = 0; i < 200; ++i) {
    UPtr a = g.gen_uexpr(8);
    UPtr b = g.gen_uexpr(8);
    CHECK((ukey(a) == ukey(b)) == alpha_eq(a, b));
  }
}

TEST_CASE("case equation binders are renamed rather than capturing") {
  // the substituted term mentions w freely; the case binds w only for its
  // own equation, so the binder must move out of the way
  ABranch br{"Z",
             {},
             a_conv(a_var("z"), {{a_var("w"), nullptr, nullptr}}, {"#1"},
                    a_var("#1"))};
  APtr c = a_case(a_var("v"), "w", {br});
  APtr r = subst(c, "z", a_var("w"));
  auto* rc = as<ACase>(r);
  REQUIRE(rc);
  CHECK(rc->eq_var != "w");
  // the free w survived, and the proof now names the renamed binder
  CHECK(free_vars(r).count("w") == 1);
  auto* conv = as<AConv>(rc->branches[0].body);
  REQUIRE(conv);
  CHECK(alpha_eq(conv->subject, a_var("w")));
  auto* proof = as<AVar>(conv->proofs[0].value);
  REQUIRE(proof);
  CHECK(proof->name == rc->eq_var);
}

TEST_CASE("fresh names avoid the given set") {
  std::set<Name> avoid{"x", "x'", "x'2"};
  CHECK(fresh_name("x", avoid) == "x'3");
  CHECK(fresh_name("y", avoid) == "y'");
}

#include "doctest.h"
#include "trellys/erasure.hpp"
#include "trellys/meta.hpp"
#include "trellys/prelude.hpp"
#include "trellys/surface.hpp"

using namespace trellys;

TEST_CASE("erasure equations, constructor by constructor") {
  CHECK(alpha_eq(erase(a_star()), u_star()));
  // lambda annotations are dropped
  CHECK(alpha_eq(erase(a_lam("x", a_tcon("Nat"), a_var("x"))),
                 u_lam("x", u_var("x"))));
  // irrelevant lambdas and applications leave placeholders
  CHECK(alpha_eq(erase(a_lam("x", a_tcon("Nat"), a_dcon("Z"),
                             Relevance::Irrelevant)),
                 u_ilam(u_dcon("Z"))));
  CHECK(alpha_eq(erase(a_app(a_var("f"), a_var("b"), Relevance::Irrelevant)),
                 u_iapp(u_var("f"))));
  // arrow types survive erasure pointwise
  CHECK(alpha_eq(erase(a_pi("x", a_tcon("Nat"), a_tcon("Bool"))),
                 u_pi("x", u_tcon("Nat"), u_tcon("Bool"))));
  // the whole join family erases to bare join
  CHECK(alpha_eq(erase(a_join(a_var("a"), a_var("b"), 5, 7)), u_join()));
  CHECK(alpha_eq(erase(a_injdom(a_var("p"))), u_join()));
  CHECK(alpha_eq(erase(a_injrng(a_var("p"), a_var("v"))), u_join()));
  CHECK(alpha_eq(erase(a_injtcon(1, a_var("p"))), u_join()));
  // abort drops its type
  CHECK(alpha_eq(erase(a_abort(a_tcon("Nat"))), u_abort()));
}

TEST_CASE("erasing a conversion leaves exactly the subject") {
  APtr subject = a_app(a_var("f"), a_var("x"));
  APtr c = a_conv(subject, {{a_var("p"), nullptr, nullptr}}, {"#1"},
                  a_tcon("Vec", {a_var("#1")}));
  CHECK(ukey(erase(c)) == ukey(erase(subject)));
}

TEST_CASE("case erasure keeps the relevant pattern variables only") {
  ABranch br{"cons",
             {{"m", Relevance::Irrelevant},
              {"x", Relevance::Relevant},
              {"xs", Relevance::Relevant},
              {"p", Relevance::Irrelevant}},
             a_var("x")};
  APtr c = a_case(a_var("v"), "w", {br});
  UPtr u = erase(c);
  auto* uc = as<UCase>(u);
  REQUIRE(uc);
  REQUIRE(uc->branches.size() == 1);
  CHECK(uc->branches[0].vars == std::vector<Name>{"x", "xs"});
}

TEST_CASE("constructor parameters are deleted, irrelevant arguments erased") {
  Registry r = registry_of(prelude());
  APtr e = parse_expr(
      "cons' [Bool] [1] [0] [(join 0 0 : 1 = S 0)] true "
      "(nil' [Bool] [0] [(join 0 0 : 0 = 0)])",
      r);
  CHECK(pretty(erase(e)) == "cons' [] [] true (nil' [])");
}

TEST_CASE("telescope and context erasure are pointwise") {
  Telescope t = {{"x", a_tcon("Nat"), Relevance::Relevant},
                 {"p", a_eq(a_var("n"), a_dcon("Z")), Relevance::Irrelevant}};
  UTelescope u = erase_telescope(t);
  REQUIRE(u.size() == 2);
  CHECK(u[0].rel == Relevance::Relevant);
  CHECK(u[1].rel == Relevance::Irrelevant);
  CHECK(alpha_eq(u[1].type, u_eq(u_var("n"), u_dcon("Z"))));
  CHECK(erase_telescope({}).empty());

  // join annotations in context types collapse to join
  AContext g = {{"x", a_tcon("Vec", {a_tcon("Nat"),
                                     a_conv(a_var("v"),
                                            {{a_join(a_var("a"), a_var("b"),
                                                     5, 5),
                                              nullptr, nullptr}},
                                            {"#1"}, a_var("#1"))})}};
  UContext ug = erase_context(g);
  REQUIRE(ug.size() == 1);
  CHECK(alpha_eq(ug[0].second, u_tcon("Vec", {u_tcon("Nat"), u_var("v")})));
}

TEST_CASE("erasure invariants on generated terms") {
  Gen g(prelude(), {31, 16});
  int done = 0;
  for (int i = 0; i < 400 && done < 250; ++i) {
    auto t = g.gen_welltyped(g.gen_type());
    if (!t) continue;
    ++done;
    APtr a = *t;
    // values erase to values
    if (is_value(a)) CHECK(is_value(erase(a)));
    // free variables shrink
    auto efv = free_vars(erase(a));
    auto afv = free_vars(a);
    for (auto& n : efv) CHECK(afv.count(n) == 1);
    // substitution commutes with erasure
    APtr v = a_dcon("S", {}, {{a_dcon("Z"), Relevance::Relevant}});
    CHECK(alpha_eq(erase(subst(a, "free", v)),
                   subst(erase(a), "free", erase(v))));
    // conversions are invisible
    APtr c = a_conv(a, {{a_join(a_tcon("Nat"), a_tcon("Nat"), 0, 0), nullptr,
                         nullptr}},
                    {"#1"}, a_var("#1"));
    CHECK(ukey(erase(c)) == ukey(erase(a)));
  }
  CHECK(done >= 100);
}

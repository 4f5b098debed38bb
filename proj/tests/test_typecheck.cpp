#include <fstream>
#include <sstream>

#include "doctest.h"
#include "trellys/eval.hpp"
#include "trellys/meta.hpp"
#include "trellys/prelude.hpp"
#include "trellys/surface.hpp"
#include "trellys/typecheck.hpp"

using namespace trellys;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CheckedProgram check_src(const std::string& src) {
  Registry reg = registry_of(prelude());
  SourceProgram prog = parse_program(src, reg);
  return check_program(prog, prelude());
}

CheckedProgram check_corpus(const std::string& name) {
  return check_src(slurp(std::string(TRELLYS_CORPUS_DIR) + "/" + name));
}

APtr P(const std::string& s) {
  Registry r = registry_of(prelude());
  return parse_expr(s, r);
}

InferResult infer_closed(const std::string& s) {
  Checker ck(prelude());
  return ck.infer(P(s));
}

std::string rule_of_failure(const std::string& src) {
  try {
    infer_closed(src);
  } catch (const TypeError& e) {
    return e.rule;
  }
  return "";
}

}  // namespace

TEST_CASE("star has type star") {
  InferResult r = infer_closed("*");
  CHECK(alpha_eq(r.type, a_star()));
  CHECK(r.deriv->rule == "t_type");
}

TEST_CASE("the prelude checks and exposes the expected arithmetic") {
  const Signature& sig = prelude();
  CHECK(sig.datatype("Nat"));
  CHECK(sig.datatype("Vec'"));
  CHECK(sig.ctor("cons'"));
  CHECK(sig.def("div"));
  CHECK(pretty(sig.def("plus")->type) == "Nat -> Nat -> Nat");
}

TEST_CASE("type equality ignores annotations") {
  // step counts vanish under erasure
  APtr t1 = a_tcon("Vec", {a_tcon("Nat"), a_join(a_var("a"), a_var("b"), 5, 5)});
  APtr t2 =
      a_tcon("Vec", {a_tcon("Nat"), a_join(a_var("a"), a_var("b"), 100, 100)});
  CHECK(type_eq(t1, t2));
  CHECK(!type_eq(a_tcon("Nat"), a_tcon("Bool")));
  // a desugared arrow equals its dependently written form
  CHECK(type_eq(P("Nat -> Nat"), a_pi("x", a_tcon("Nat"), a_tcon("Nat"))));
}

TEST_CASE("application needs a matching function type and a good result kind") {
  InferResult r = infer_closed("plus 1");
  CHECK(pretty(r.type) == "Nat -> Nat");
  CHECK(rule_of_failure("plus true") == "t_app");
  CHECK(rule_of_failure("plus 1 1 2") == "t_app");
}

TEST_CASE("irrelevant arguments must be syntactic values") {
  CHECK(rule_of_failure("(\\[x : Nat] . 0) [abort Nat]") == "t_iapp");
  CHECK(rule_of_failure("(\\[x : Nat] . 0) [plus 1 1]") == "t_iapp");
  // a value is fine
  InferResult r = infer_closed("(\\[x : Nat] . 0) [1]");
  CHECK(pretty(r.type) == "Nat");
}

TEST_CASE("irrelevant binders may not survive erasure") {
  CHECK(rule_of_failure("\\[x : Nat] . x") == "t_iabs");
  // but they may appear in annotations
  InferResult r = infer_closed("\\[x : Nat] . join 0 0 : x = x");
  auto* pi = as<APi>(r.type);
  REQUIRE(pi);
  CHECK(pi->rel == Relevance::Irrelevant);
}

TEST_CASE("rec bodies must be values of the annotated arrow type") {
  CHECK(rule_of_failure("rec f : Nat . 0") == "t_rec");
  CHECK(rule_of_failure("rec f : Nat -> Nat . f 0") == "t_rec");
  InferResult r = infer_closed("rec f : Nat -> Nat . \\x : Nat . f x");
  CHECK(pretty(r.type) == "Nat -> Nat");
}

TEST_CASE("equations only need both sides to be well-typed") {
  // different types on the two sides
  InferResult r = infer_closed("true = 0");
  CHECK(alpha_eq(r.type, a_star()));
  // and even false equations are statable
  CHECK(alpha_eq(infer_closed("isZero 0 = false").type, a_star()));
}

TEST_CASE("join runs the erased sides under cbv") {
  CHECK(alpha_eq(infer_closed("join : plus 1 1 = 2").type,
                 P("plus 1 1 = 2")));
  CHECK(rule_of_failure("join : isZero 0 = false") == "t_join");
  CHECK(rule_of_failure("join 0 0 : plus 1 1 = 2") == "t_join");
  // variables are values: beta fires inside the bounded run
  InferResult r =
      infer_closed("\\x : Nat . join : (\\x' : Nat . Bool) x = Bool");
  CHECK(as<APi>(r.type));
}

TEST_CASE("conv rewrites through a template") {
  Checker ck(prelude());
  AContext ctx = {{"x", a_tcon("Nat")},
                  {"y", a_eq(a_var("x"), P("3"))},
                  {"v", a_tcon("Vec", {a_tcon("Nat"), a_var("x")})}};
  InferResult r = ck.infer_in(ctx, P("conv v at Vec Nat ~y"));
  CHECK(pretty(r.type) == "Vec Nat 3");
  CHECK(r.deriv->rule == "t_conv");
}

TEST_CASE("conv proofs must be values proving equations") {
  Checker ck(prelude());
  AContext ctx = {{"x", a_tcon("Nat")},
                  {"v", a_tcon("Vec", {a_tcon("Nat"), a_var("x")})}};
  CHECK_THROWS_AS(ck.infer_in(ctx, P("conv v at Vec Nat ~(plus 1 1)")),
                  TypeError);
  CHECK_THROWS_AS(ck.infer_in(ctx, P("conv v at Vec Nat ~x")), TypeError);
}

TEST_CASE("annotation proofs only fit irrelevant template positions") {
  // (\[z:Nat].0) [x1] puts x1 in an erased position
  Checker ck(prelude());
  AContext ctx = {{"g", P("[z : Nat] -> Nat")}};
  InferResult r = ck.infer_in(
      ctx, P("conv (join 0 0 : g [1] = g [1]) at (g [~[1 = 2]] = g [1])"));
  CHECK(alpha_eq(r.type, P("g [2] = g [1]")));
  // at a relevant position the same annotation is rejected
  CHECK_THROWS_AS(
      ck.infer_in(ctx, P("conv (join 0 0 : 1 = 1) at (~[1 = 2] = 1)")),
      TypeError);
}

TEST_CASE("the n-ary conv example types both substitutions at once") {
  CheckedProgram out = check_corpus("conv.tre");
  const Def* d = out.sig.def("congApp");
  REQUIRE(d);
  // target: (f' x') = (f x)
  auto* pi = as<APi>(d->type);
  while (pi) {
    auto* next = as<APi>(pi->codomain);
    if (!next) break;
    pi = next;
  }
  REQUIRE(pi);
  CHECK(pretty(pi->codomain) == "f' x' = f x");
}

TEST_CASE("injectivity forms") {
  Checker ck(prelude());
  AContext ctx = {{"p", P("((x : Nat) -> Nat) = ((x : Bool) -> Nat)")},
                  {"q", P("Vec Nat 1 = Vec Nat 2")},
                  {"ip", P("([x : Nat] -> Nat) = ([x : Bool] -> Bool)")}};
  CHECK(pretty(ck.infer_in(ctx, P("injdom p")).type) == "Nat = Bool");
  CHECK(ck.infer_in(ctx, P("injdom p")).deriv->rule == "t_injdom");
  CHECK(pretty(ck.infer_in(ctx, P("injrng p 4")).type) == "Nat = Nat");
  CHECK(pretty(ck.infer_in(ctx, P("injtcon 2 q")).type) == "1 = 2");
  CHECK(ck.infer_in(ctx, P("injdom ip")).deriv->rule == "t_iinjdom");
  CHECK(ck.infer_in(ctx, P("injrng ip 4")).deriv->rule == "t_iinjrng");
  // witnesses must be values of the left domain
  CHECK_THROWS_AS(ck.infer_in(ctx, P("injrng p (plus 1 1)")), TypeError);
  CHECK_THROWS_AS(ck.infer_in(ctx, P("injrng p true")), TypeError);
  CHECK_THROWS_AS(ck.infer_in(ctx, P("injtcon 3 q")), TypeError);
  // mismatched relevance on the two sides
  AContext bad = {{"r", P("((x : Nat) -> Nat) = ([x : Nat] -> Nat)")}};
  CHECK_THROWS_AS(ck.infer_in(bad, P("injdom r")), TypeError);
}

TEST_CASE("case checking covers constructors exactly") {
  CHECK(pretty(infer_closed("case 2 as [w] of { Z => true ; S k => false }")
                   .type) == "Bool");
  CHECK(rule_of_failure("case 2 as [w] of { Z => true }") == "t_case");
  CHECK(rule_of_failure(
            "case 2 as [w] of { Z => true ; S k => false ; S k => true }") ==
        "t_case");
  CHECK(rule_of_failure("case 2 as [w] of { Z => true ; S k => 0 }") ==
        "t_case");
  // scrutinee must be data
  CHECK(rule_of_failure("case (\\x : Nat . x) as [w] of { }") == "t_case");
  // empty matches need an ascription
  Checker ck(prelude());
  AContext ctx = {{"e", a_tcon("Empty")}};
  CHECK(pretty(ck.infer_in(ctx, P("case e as [w] return Nat of { }")).type) ==
        "Nat");
  CHECK_THROWS_AS(ck.infer_in(ctx, P("case e as [w] of { }")), TypeError);
}

TEST_CASE("case equation variable and irrelevant binders stay irrelevant") {
  // using the equation variable relevantly is rejected
  Checker ck(prelude());
  AContext ctx = {{"v", P("Vec' Nat 1")}};
  CHECK_THROWS_AS(
      ck.infer_in(ctx, P("case v as [w] of { nil' [p] => 0 ; cons' [m] [p] x "
                         "xs => m }")),
      TypeError);
  // but irrelevant binders may flow into conv proofs
  InferResult r = ck.infer_in(
      ctx,
      P("case v as [w] of { nil' [p] => 0 ; cons' [m] [p] x xs => 1 }"));
  CHECK(pretty(r.type) == "Nat");
}

TEST_CASE("datatype declarations are validated") {
  // irrelevant parameters are rejected
  {
    Registry reg = registry_of(prelude());
    SourceProgram prog = parse_program("data D [a : *] where { }", reg);
    CHECK_THROWS_AS(check_program(prog, prelude()), TypeError);
  }
  // constructors must target the datatype applied to its parameters
  {
    Registry reg = registry_of(prelude());
    SourceProgram prog =
        parse_program("data D (a : *) where { mk : Nat }", reg);
    CHECK_THROWS_AS(check_program(prog, prelude()), TypeError);
  }
  {
    Registry reg = registry_of(prelude());
    SourceProgram prog =
        parse_program("data D (a : *) where { mk : D Nat }", reg);
    CHECK_THROWS_AS(check_program(prog, prelude()), TypeError);
  }
  // duplicate names are rejected
  {
    Registry reg = registry_of(prelude());
    SourceProgram prog = parse_program("data Nat where { }", reg);
    CHECK_THROWS_AS(check_program(prog, prelude()), TypeError);
  }
  // recursive fields are fine
  {
    Registry reg = registry_of(prelude());
    SourceProgram prog = parse_program(
        "data Tree (a : *) where { leaf : Tree a ; node : (l : Tree a) -> "
        "(x : a) -> (r : Tree a) -> Tree a }",
        reg);
    CheckedProgram out = check_program(prog, prelude());
    CHECK(out.sig.datatype("Tree"));
  }
}

TEST_CASE("programs check in order and definitions respect the value rule") {
  // the empty program leaves the signature unchanged
  CheckedProgram out = check_src("");
  CHECK(out.defs.empty());
  // a non-value definition cannot be referenced later
  Registry reg = registry_of(prelude());
  SourceProgram prog = parse_program(
      "d1 : Nat\nd1 = plus 1 1\nd2 : Nat\nd2 = d1", reg);
  try {
    check_program(prog, prelude());
    FAIL("expected a type error");
  } catch (const TypeError& e) {
    CHECK(std::string(e.what()).find("syntactic value") != std::string::npos);
  }
  // a wrong proof for safediv is rejected by the join rule
  CHECK(rule_of_failure("(\\x : Nat . \\y : Nat . \\p : (isZero y = false) . "
                        "div x y) 1 0 (join : isZero 0 = false)") == "t_join");
}

TEST_CASE("the whole corpus checks or is rejected as designed") {
  for (const char* f : {"safediv.tre", "diverge.tre", "vec.tre",
                        "vecprime.tre", "conv.tre", "irrelevance.tre",
                        "match.tre"}) {
    CHECK_NOTHROW(check_corpus(f));
  }
  CHECK_THROWS_AS(check_corpus("reject_irrelevant_abort.tre"), TypeError);
  CHECK_THROWS_AS(check_corpus("reject_extensionality.tre"), TypeError);
}

TEST_CASE("corpus signatures match the expected types") {
  CheckedProgram out = check_corpus("safediv.tre");
  CHECK(pretty(out.sig.def("safediv")->type) ==
        "Nat -> (y : Nat) -> isZero y = false -> Nat");
  CheckedProgram vec = check_corpus("vec.tre");
  CHECK(pretty(vec.sig.def("app")->type) ==
        "(n1 : Nat) -> (n2 : Nat) -> (a : *) -> Vec a n1 -> Vec a n2 -> "
        "Vec a (plus n1 n2)");
  CheckedProgram irr = check_corpus("irrelevance.tre");
  auto* pi = as<APi>(irr.sig.def("irrex")->type);
  REQUIRE(pi);
  CHECK(pi->rel == Relevance::Irrelevant);
}

TEST_CASE("inference is deterministic") {
  for (const char* src :
       {"plus 2 3", "\\x : Nat . case x as [w] of { Z => x ; S k => k }",
        "conv (join 0 0 : 1 = 1) at (1 = 1)"}) {
    InferResult a = infer_closed(src);
    InferResult b = infer_closed(src);
    CHECK(alpha_eq(a.type, b.type));
    CHECK(a.deriv->rule == b.deriv->rule);
  }
}

TEST_CASE("inference terminates on random inputs, well-typed or not") {
  Gen g(prelude(), {61, 14});
  Checker ck(prelude());
  int accepted = 0, rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    auto t = g.gen_welltyped(g.gen_type());
    if (!t) continue;
    // corrupt roughly half of them
    APtr candidate = *t;
    if (i % 2 == 0)
      candidate = a_app(candidate, a_var("unbound" + std::to_string(i)));
    try {
      ck.infer(candidate);
      ++accepted;
    } catch (const TypeError&) {
      ++rejected;
    }
  }
  CHECK(accepted > 0);
  CHECK(rejected > 0);
}

TEST_CASE("erased free variables all come from relevant bindings") {
  // every name surviving erasure is a value definition or a relevant binder
  for (const char* f : {"safediv.tre", "vec.tre", "irrelevance.tre"}) {
    CheckedProgram out = check_corpus(f);
    for (auto& def : out.defs) {
      for (auto& n : free_vars(erase(def.body))) {
        const Def* d = out.sig.def(n);
        REQUIRE_MESSAGE(d != nullptr, f, "/", def.name, " erases with free ",
                        n);
        CHECK(d->is_value);
      }
    }
  }
}

TEST_CASE("runnable bodies substitute earlier definitions") {
  CheckedProgram out = check_corpus("safediv.tre");
  UPtr body = runnable_body(out.sig, "demo");
  CHECK(free_vars(body).empty());
  RunResult r = run(body, kDefaultFuel);
  REQUIRE(r.outcome == Outcome::Value);
  CHECK(pretty(r.final) == "2");
}

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

CheckedProgram check_corpus(const std::string& name) {
  Registry reg = registry_of(prelude());
  SourceProgram prog =
      parse_program(slurp(std::string(TRELLYS_CORPUS_DIR) + "/" + name), reg);
  return check_program(prog, prelude());
}

}  // namespace

TEST_CASE("generated terms re-check at their target type") {
  Gen g(prelude(), {71, 18});
  Checker ck(prelude());
  int done = 0;
  for (int i = 0; i < 500 && done < 300; ++i) {
    APtr type = g.gen_type();
    auto t = g.gen_welltyped(type);
    if (!t) continue;
    ++done;
    InferResult r = ck.infer(*t);
    CHECK_MESSAGE(type_eq(r.type, type), "generated ", pretty(*t), " : ",
                  pretty(r.type), " instead of ", pretty(type));
    CHECK(free_vars(*t).empty());
  }
  CHECK(done >= 200);
}

TEST_CASE("open-mode generation types under the variable pool") {
  GenConfig cfg;
  cfg.seed = 9;
  cfg.closed = false;
  Gen g(prelude(), cfg);
  Checker ck(prelude());
  AContext pool = {{"fx", a_tcon("Nat")},
                   {"fb", a_tcon("Bool")},
                   {"ff", a_pi("fz", a_tcon("Nat"), a_tcon("Nat"))}};
  bool saw_open = false;
  for (int i = 0; i < 100; ++i) {
    APtr type = g.gen_type();
    auto t = g.gen_welltyped(type);
    if (!t) continue;
    if (!free_vars(*t).empty()) saw_open = true;
    InferResult r = ck.infer_in(pool, *t);
    CHECK(type_eq(r.type, type));
  }
  CHECK(saw_open);
}

TEST_CASE("tiny budgets give the minimal inhabitant") {
  GenConfig cfg;
  cfg.seed = 5;
  cfg.max_size = 1;
  Gen g(prelude(), cfg);
  auto t = g.gen_welltyped(a_tcon("Nat"));
  REQUIRE(t);
  bool minimal = alpha_eq(*t, a_dcon("Z"));
  CHECK(minimal);
}

TEST_CASE("the generator reaches successors and functions") {
  bool saw_ssz = false, saw_lam_or_rec = false;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Gen g(prelude(), {seed, 10});
    if (auto t = g.gen_welltyped(a_tcon("Nat"))) {
      auto* d = as<ADCon>(*t);
      if (d && d->ctor == "S") {
        auto* inner = d->args.empty() ? nullptr : as<ADCon>(d->args[0].term);
        if (inner && inner->ctor == "S") saw_ssz = true;
      }
    }
    if (auto f = g.gen_welltyped(a_pi("x", a_tcon("Nat"), a_tcon("Nat")))) {
      if (as<ALam>(*f) || as<ARec>(*f)) saw_lam_or_rec = true;
    }
  }
  CHECK(saw_ssz);
  CHECK(saw_lam_or_rec);
}

TEST_CASE("derivation erasure maps rules to their unannotated counterparts") {
  Checker ck(prelude());
  Registry reg = registry_of(prelude());
  InferResult j = ck.infer(parse_expr("join : plus 1 1 = 2", reg));
  CHECK(erase_derivation(j.deriv)->rule == "et_join");
  InferResult l = ck.infer(parse_expr("\\x : Nat . x", reg));
  UDerivPtr ul = erase_derivation(l.deriv);
  CHECK(ul->rule == "et_abs");
  CHECK(ul->children.size() == 1);  // the domain kinding premise is dropped
  CHECK(alpha_eq(ul->subject, u_lam("x", u_var("x"))));
}

TEST_CASE("a fully irrelevant conversion erases to its subject derivation") {
  Checker ck(prelude());
  Registry reg = registry_of(prelude());
  AContext ctx = {{"g", parse_expr("[z : Nat] -> Nat", reg)}};
  InferResult r = ck.infer_in(
      ctx,
      parse_expr("conv (join 0 0 : g [1] = g [1]) at (g [~[1 = 2]] = g [1])",
                 reg));
  REQUIRE(r.deriv->rule == "t_conv");
  UDerivPtr u = erase_derivation(r.deriv);
  // no value proofs: the subject's erased derivation stands in
  CHECK(u->rule == "et_join");
  CHECK(alpha_eq(erase(r.type), u->type));
}

TEST_CASE("mixed value and annotation proofs validate after erasure") {
  Checker ck(prelude());
  Registry reg = registry_of(prelude());
  AContext ctx = {{"g", parse_expr("[z : Nat] -> Nat -> Nat", reg)},
                  {"n", a_tcon("Nat")},
                  {"q", parse_expr("n = 2", reg)}};
  // one rewrite at a relevant position (value proof q), one at an erased
  // position (annotation)
  InferResult r = ck.infer_in(
      ctx, parse_expr("conv (join 0 0 : g [1] n = g [1] n) at "
                      "(g [~[1 = 0]] ~q = g [1] n)",
                      reg));
  CHECK(alpha_eq(erase(r.type), erase(parse_expr("g [0] 2 = g [1] n", reg))));
  UDerivPtr u = erase_derivation(r.deriv);
  REQUIRE(u->rule == "et_conv");
  CHECK(u->conv_vars.size() == 1);  // the annotation variable vanished
  USignature usig = erase_signature(prelude());
  // the derivation context must be supplied for the validator root
  auto root = std::make_shared<UDerivation>(*u);
  ValidateResult v = validate_uderivation(root, usig, ck.unfolds());
  CHECK_MESSAGE(v.ok, v.path, ": ", v.reason);
}

TEST_CASE("branches may be written in any order") {
  Checker ck(prelude());
  Registry reg = registry_of(prelude());
  InferResult r = ck.infer(
      parse_expr("case 1 as [w] of { S k => 0 ; Z => 1 }", reg));
  CHECK(pretty(r.type) == "Nat");
  USignature usig = erase_signature(prelude());
  ValidateResult v =
      validate_uderivation(erase_derivation(r.deriv), usig, ck.unfolds());
  CHECK_MESSAGE(v.ok, v.path, ": ", v.reason);
}

TEST_CASE("a single star node validates") {
  auto node = std::make_shared<UDerivation>();
  node->rule = "et_type";
  node->ctx = {{"x", u_tcon("Nat")}};
  node->subject = u_star();
  node->type = u_star();
  USignature usig = erase_signature(prelude());
  CHECK(validate_uderivation(node, usig, {}).ok);
}

TEST_CASE("irrelevant abstraction and application derivations validate") {
  Checker ck(prelude());
  Registry reg = registry_of(prelude());
  InferResult r = ck.infer(parse_expr("(\\[x : Nat] . 0) [1]", reg));
  UDerivPtr u = erase_derivation(r.deriv);
  REQUIRE(u->rule == "et_iapp");
  // the hidden witness survives in the second premise
  CHECK(is_value(u->children[1]->subject));
  USignature usig = erase_signature(prelude());
  ValidateResult v = validate_uderivation(u, usig, ck.unfolds());
  CHECK_MESSAGE(v.ok, v.path, ": ", v.reason);
}

TEST_CASE("join validation falls back to parallel reduction") {
  // with a zero cbv budget the equation only validates through joinable
  CheckedProgram out = check_corpus("safediv.tre");
  USignature usig = erase_signature(out.sig);
  Checker ck(out.sig);
  const CheckedDef* demo = nullptr;
  for (auto& d : out.defs)
    if (d.name == "demo") demo = &d;
  REQUIRE(demo);
  UDerivPtr u = erase_derivation(demo->deriv);
  ValidateFuel strict{0, 0};
  CHECK(!validate_uderivation(u, usig, ck.unfolds(), strict).ok);
  ValidateFuel parallel_only{0, 8};
  ValidateResult v = validate_uderivation(u, usig, ck.unfolds(), parallel_only);
  CHECK_MESSAGE(v.ok, v.path, ": ", v.reason);
}

TEST_CASE("erased derivations of the prelude definitions validate") {
  CheckedProgram out = check_prelude();
  USignature usig = erase_signature(out.sig);
  Checker ck(out.sig);
  for (auto& def : out.defs) {
    ValidateResult r =
        validate_uderivation(erase_derivation(def.deriv), usig, ck.unfolds());
    CHECK_MESSAGE(r.ok, def.name, " failed at ", r.path, ": ", r.reason);
  }
}

TEST_CASE("erased derivations of every corpus definition validate") {
  USignature pusig = erase_signature(prelude());
  for (const char* f : {"safediv.tre", "diverge.tre", "vec.tre",
                        "vecprime.tre", "conv.tre", "irrelevance.tre",
                        "match.tre"}) {
    CheckedProgram out = check_corpus(f);
    USignature usig = erase_signature(out.sig);
    Checker ck(out.sig);
    for (auto& def : out.defs) {
      UDerivPtr u = erase_derivation(def.deriv);
      ValidateResult r = validate_uderivation(u, usig, ck.unfolds());
      CHECK_MESSAGE(r.ok, f, "/", def.name, " failed at ", r.path, ": ",
                    r.reason);
    }
  }
}

TEST_CASE("tampering with a conclusion is caught") {
  CheckedProgram out = check_corpus("safediv.tre");
  Checker ck(out.sig);
  USignature usig = erase_signature(out.sig);
  UDerivPtr u = erase_derivation(out.defs[0].deriv);
  REQUIRE(validate_uderivation(u, usig, ck.unfolds()).ok);
  auto tampered = std::make_shared<UDerivation>(*u);
  tampered->type = u_tcon("Bool");
  ValidateResult r = validate_uderivation(tampered, usig, ck.unfolds());
  CHECK(!r.ok);
  CHECK(!r.path.empty());
}

TEST_CASE("the validator rejects a non-joinable join node") {
  auto kind = std::make_shared<UDerivation>();
  kind->rule = "et_eq";
  kind->subject = u_eq(u_tcon("Nat"), u_tcon("Bool"));
  kind->type = u_star();
  auto lhs = std::make_shared<UDerivation>();
  lhs->rule = "et_tcon";
  lhs->subject = u_tcon("Nat");
  lhs->type = u_star();
  auto rhs = std::make_shared<UDerivation>(*lhs);
  rhs->subject = u_tcon("Bool");
  kind->children = {lhs, rhs};
  auto join = std::make_shared<UDerivation>();
  join->rule = "et_join";
  join->subject = u_join();
  join->type = kind->subject;
  join->children = {kind};
  USignature usig = erase_signature(prelude());
  ValidateResult r = validate_uderivation(join, usig, {});
  CHECK(!r.ok);
  CHECK(r.reason.find("join") != std::string::npos);
}

TEST_CASE("suites pass at unit-test scale") {
  CHECK(progress_suite(prelude(), 100, 2000, 3).failed == 0);
  CHECK(diamond_suite(100, 4).failed == 0);
  CHECK(canonical_forms_suite(prelude(), 100, 5).failed == 0);
  CHECK(erasure_soundness_suite(prelude(), 60, 6).failed == 0);
  CHECK(subst_lemma_suite(100, 7).failed == 0);
  // the dispatcher knows the names
  CHECK(run_suite(prelude(), "progress", 10, 1).suite == "progress");
  CHECK(run_suite(prelude(), "nope", 1, 1).failed == 1);
}

TEST_CASE("shrinking keeps the failure and never grows the term") {
  Gen g(prelude(), {81, 16});
  auto pred = [](const APtr& t) { return node_count(t) > 2; };
  int shrunk = 0;
  for (int i = 0; i < 50; ++i) {
    auto t = g.gen_welltyped(a_tcon("Nat"));
    if (!t || !pred(*t)) continue;
    APtr small = shrink_welltyped(prelude(), *t, pred);
    CHECK(pred(small));
    CHECK(node_count(small) <= node_count(*t));
    if (node_count(small) < node_count(*t)) ++shrunk;
  }
  CHECK(shrunk > 0);
}

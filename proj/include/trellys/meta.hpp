#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "trellys/erasure.hpp"
#include "trellys/typecheck.hpp"

// Random term generation and the executable-metatheory property suites,
// including a rule-by-rule validator for erased typing derivations.

namespace trellys {

struct GenConfig {
  std::uint64_t seed = 0;
  int max_size = 20;
  // Weights for the main generator branches. With the defaults, closed Nat
  // programs measure roughly 68% values / 16% abort / 16% divergent within
  // 2000 steps.
  int w_value = 6;
  int w_app = 2;
  int w_case = 1;
  int w_other = 1;
  // When false, terms may mention a small pool of typed free variables.
  bool closed = true;
};

class Gen {
 public:
  Gen(const Signature& sig, GenConfig cfg);

  // A closed, well-typed annotated term at the given type (which must check
  // against *). Returns nullopt after bounded retries.
  std::optional<APtr> gen_welltyped(const APtr& type);
  // A random closed type from the generator's pool.
  APtr gen_type();
  // A raw unannotated term (not necessarily well-typed) of bounded size.
  UPtr gen_uexpr(int max_nodes);

  std::mt19937_64& rng() { return rng_; }

 private:
  APtr gen_at(const AContext& ctx, const APtr& type, int budget);
  UPtr gen_u(std::vector<Name>& scope, int budget);
  int pick(int bound);

  const Signature& sig_;
  GenConfig cfg_;
  std::mt19937_64 rng_;
  int fresh_ = 0;
};

// ---------------------------------------------------------------------------
// Erased derivations
// ---------------------------------------------------------------------------

struct UDerivation;
using UDerivPtr = std::shared_ptr<const UDerivation>;

struct UDerivation {
  std::string rule;  // et_* tag
  UContext ctx;
  UPtr subject;
  UPtr type;
  std::vector<UDerivPtr> children;
  // et_conv payload
  std::vector<Name> conv_vars;
  UPtr conv_template;
  // et_injtcon payload
  std::int64_t aux_index = 0;
};

struct USignature {
  std::vector<UDataDecl> datatypes;
  const UDataDecl* datatype(const Name& n) const;
  struct CtorRef {
    const UDataDecl* data;
    const UCtorDecl* ctor;
  };
  std::optional<CtorRef> ctor(const Name& n) const;
};

USignature erase_signature(const Signature& sig);

// Maps each t_* node of a derivation produced by infer to its et_*
// counterpart with erased context, subject and type.
UDerivPtr erase_derivation(const DerivPtr& d);

struct ValidateFuel {
  std::int64_t cbv_bound = 1000;
  int parallel_depth = 3;
};

struct ValidateResult {
  bool ok;
  std::string path;    // first failing node, e.g. "root.2.0"
  std::string reason;  // why it failed
};

// Checks every node locally against its et_* rule. Join nodes are accepted if
// either the bounded CBV test or the bounded parallel-reduction test succeeds
// (with definitions unfolded, matching how the checker ran them).
ValidateResult validate_uderivation(const UDerivPtr& d, const USignature& usig,
                                    const std::vector<std::pair<Name, UPtr>>& unfolds,
                                    ValidateFuel fuel = {});

// ---------------------------------------------------------------------------
// Property suites
// ---------------------------------------------------------------------------

struct SuiteReport {
  std::string suite;
  int cases = 0;
  int passed = 0;
  int failed = 0;
  int skipped = 0;  // generation failures / budget blowups, not test failures
  std::vector<std::string> counterexamples;
  double seconds = 0.0;
  bool ok() const { return failed == 0; }
};

SuiteReport progress_suite(const Signature& sig, int cases, std::uint64_t fuel,
                           std::uint64_t seed);
SuiteReport diamond_suite(int cases, std::uint64_t seed);
SuiteReport canonical_forms_suite(const Signature& sig, int cases,
                                  std::uint64_t seed);
SuiteReport erasure_soundness_suite(const Signature& sig, int cases,
                                    std::uint64_t seed);
SuiteReport subst_lemma_suite(int cases, std::uint64_t seed);

SuiteReport run_suite(const Signature& sig, const std::string& name, int cases,
                      std::uint64_t seed);

// Structural shrinking: repeatedly replaces subterms with smaller well-typed
// terms of the same type while the predicate keeps failing (at most
// `attempts` candidate replacements).
APtr shrink_welltyped(const Signature& sig, APtr term,
                      const std::function<bool(const APtr&)>& still_failing,
                      int attempts = 200);

}  // namespace trellys

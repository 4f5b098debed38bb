#pragma once

#include <memory>
#include <optional>
#include <stdexcept>

#include "trellys/erasure.hpp"
#include "trellys/surface.hpp"
#include "trellys/syntax.hpp"

// The decidable, syntax-directed type checker for annotated terms, including
// datatype declaration checking and reified typing derivations. Types are
// compared by alpha equality of erasures, so annotations (step counts,
// conversion proofs) never block typing.

namespace trellys {

struct TypeError : std::runtime_error {
  std::string rule;
  TypeError(std::string rule_, const std::string& msg)
      : std::runtime_error("[" + rule_ + "] " + msg), rule(std::move(rule_)) {}
};

struct Def {
  Name name;
  APtr type;
  APtr body;
  bool is_value;  // only value definitions are visible to later terms
};

class Signature {
 public:
  struct CtorRef {
    const DataDecl* data;
    const CtorDecl* ctor;
  };

  const DataDecl* datatype(const Name& n) const;
  std::optional<CtorRef> ctor(const Name& n) const;
  const Def* def(const Name& n) const;
  const std::vector<DataDecl>& datatypes() const { return datatypes_; }
  const std::vector<Def>& defs() const { return defs_; }
  void add_datatype(DataDecl d);
  void add_def(Def d);
  bool known(const Name& n) const;

 private:
  std::vector<DataDecl> datatypes_;
  std::vector<Def> defs_;
};

// Annotation-insensitive type equality: alpha equality of erasures.
bool type_eq(const APtr& a, const APtr& b);

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

// A rule-labeled typing derivation; children are ordered per rule as
// documented in docs/formats.md.
struct Derivation {
  std::string rule;
  AContext ctx;  // variable context snapshot (datatypes live in the signature)
  APtr subject;
  APtr type;
  std::vector<DerivPtr> children;
  // t_conv payload: template variables and the template they bind in
  std::vector<Name> conv_vars;
  APtr conv_template;
};

struct InferResult {
  APtr type;
  DerivPtr deriv;
};

class Checker {
 public:
  explicit Checker(const Signature& sig);

  // Infers the unique type of a in the ambient context (value definitions in
  // scope) or throws TypeError.
  InferResult infer(const APtr& a);
  // Infers under additional variable bindings (innermost last).
  InferResult infer_in(const AContext& extra, const APtr& a);
  // Checks that t is a type and returns its kinding derivation.
  DerivPtr check_type(const APtr& t);

  // Erased bodies of the value definitions in scope, fully unfolded.
  const std::vector<std::pair<Name, UPtr>>& unfolds() const { return unfolds_; }
  // Substitutes all definition bodies into m.
  UPtr unfold(const UPtr& m) const;

 private:
  InferResult infer_rec(const APtr& a);
  DerivPtr kind_check(const APtr& t);
  InferResult infer_conv(const APtr& a, const AConv& c);
  InferResult infer_case(const APtr& a, const ACase& c);
  // Dependent telescope check; returns the accumulated substitution and
  // appends one derivation per entry.
  ASubst tele_check(const std::string& rule, const Telescope& tele,
                    const std::vector<AArg>& args, ASubst initial,
                    std::vector<DerivPtr>& out);
  DerivPtr node(std::string rule, APtr subject, APtr type,
                std::vector<DerivPtr> children, std::vector<Name> conv_vars = {},
                APtr conv_template = nullptr) const;
  std::optional<APtr> lookup(const Name& n) const;

  const Signature& sig_;
  AContext ctx_;
  std::vector<std::pair<Name, UPtr>> unfolds_;
  int depth_ = 0;
};

// Checks a parsed datatype declaration against the signature; the caller adds
// the result. Parameters must be relevant; constructors must target D applied
// to exactly the parameter variables; recursive fields are fine.
DataDecl check_datatype(const Signature& sig, const RawDataDecl& raw);

struct CheckedDef {
  Name name;
  APtr type;
  APtr body;
  bool is_value;
  DerivPtr deriv;
};

struct CheckedProgram {
  Signature sig;
  std::vector<CheckedDef> defs;
};

// Checks items in order; the first failure is thrown. Value definitions enter
// the context for later items; non-value definitions are checked and kept
// runnable but cannot be referenced.
CheckedProgram check_program(const SourceProgram& prog, const Signature& base);

// Erased body of a definition with all definitions substituted away;
// suitable for the evaluator.
UPtr runnable_body(const Signature& sig, const Name& def);

Registry registry_of(const Signature& sig);

}  // namespace trellys

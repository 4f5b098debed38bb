#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

// Abstract syntax for the two languages: annotated expressions (AExpr), the
// input of the type checker, and unannotated expressions (UExpr), the subject
// of evaluation. Both are immutable shared trees with named binders;
// substitution is capture-avoiding and alpha_eq is the observable equality.

namespace trellys {

enum class Relevance { Relevant, Irrelevant };

using Name = std::string;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------------------
// Annotated language
// ---------------------------------------------------------------------------

struct AExpr;
using APtr = std::shared_ptr<const AExpr>;

struct AStar {};
struct AVar {
  Name name;
};
// rec f : A . body -- f scopes over body only, not over A.
struct ARec {
  Name f;
  APtr type;
  APtr body;
};
struct AAbort {
  APtr type;
};
struct APi {
  Name var;
  APtr domain;
  APtr codomain;
  Relevance rel;
};
struct ALam {
  Name var;
  APtr domain;
  APtr body;
  Relevance rel;
};
struct AApp {
  APtr fun;
  APtr arg;
  Relevance rel;
};
struct ATCon {
  Name dtype;
  std::vector<APtr> params;
};
struct AArg {
  APtr term;
  Relevance rel;
};
// Constructors are always fully applied: first the datatype parameters, then
// the telescope arguments with their relevance.
struct ADCon {
  Name ctor;
  std::vector<APtr> params;
  std::vector<AArg> args;
};
struct APatVar {
  Name name;
  Relevance rel;
};
// Branch binders carry names and relevance; the typed telescope is
// reconstructed from the signature when the branch is checked.
struct ABranch {
  Name ctor;
  std::vector<APatVar> binders;
  APtr body;
};
// case scrut as [eq_var] (return result)? of { branches }
// eq_var scopes over every branch body, binding after the pattern variables.
// result is the optional ascription (required when there are no branches).
struct ACase {
  APtr scrutinee;
  Name eq_var;
  std::vector<ABranch> branches;
  APtr result;  // may be null
};
struct AEq {
  APtr lhs;
  APtr rhs;
};
struct AJoin {
  APtr lhs;
  APtr rhs;
  std::int64_t steps_lhs;
  std::int64_t steps_rhs;
};
struct AInjDom {
  APtr proof;
};
struct AInjRng {
  APtr proof;
  APtr witness;
};
struct AInjTCon {
  std::int64_t index;  // 1-based
  APtr proof;
};
// Either a value proof of an equation (lhs/rhs recovered from its inferred
// type at check time) or a bare annotation [lhs = rhs] for an irrelevant
// position.
struct ConvProof {
  APtr value;             // non-null: value proof
  APtr ann_lhs, ann_rhs;  // non-null pair: annotation proof
  bool is_value_proof() const { return value != nullptr; }
};
// conv subject at [~P1/x1]..[~Pi/xi] template; vars bind in template only.
struct AConv {
  APtr subject;
  std::vector<ConvProof> proofs;
  std::vector<Name> vars;
  APtr templ;
};

struct AExpr {
  std::variant<AStar, AVar, ARec, AAbort, APi, ALam, AApp, ATCon, ADCon, ACase,
               AEq, AJoin, AInjDom, AInjRng, AInjTCon, AConv>
      node;
};

template <class T>
const T* as(const APtr& e) {
  return std::get_if<T>(&e->node);
}

APtr a_star();
APtr a_var(Name n);
APtr a_rec(Name f, APtr type, APtr body);
APtr a_abort(APtr type);
APtr a_pi(Name x, APtr dom, APtr cod, Relevance rel = Relevance::Relevant);
APtr a_lam(Name x, APtr dom, APtr body, Relevance rel = Relevance::Relevant);
APtr a_app(APtr fun, APtr arg, Relevance rel = Relevance::Relevant);
APtr a_tcon(Name d, std::vector<APtr> params = {});
APtr a_dcon(Name d, std::vector<APtr> params = {}, std::vector<AArg> args = {});
APtr a_case(APtr scrut, Name eq_var, std::vector<ABranch> branches,
            APtr result = nullptr);
APtr a_eq(APtr l, APtr r);
APtr a_join(APtr l, APtr r, std::int64_t i = 100, std::int64_t j = 100);
APtr a_injdom(APtr p);
APtr a_injrng(APtr p, APtr witness);
APtr a_injtcon(std::int64_t k, APtr p);
APtr a_conv(APtr subject, std::vector<ConvProof> proofs, std::vector<Name> vars,
            APtr templ);

// ---------------------------------------------------------------------------
// Unannotated language
// ---------------------------------------------------------------------------

struct UExpr;
using UPtr = std::shared_ptr<const UExpr>;

struct UStar {};
struct UVar {
  Name name;
};
struct URec {
  Name f;
  UPtr body;
};
struct UAbort {};
struct UPi {
  Name var;
  UPtr domain;
  UPtr codomain;
  Relevance rel;
};
// Irrelevant lambdas bind nothing: var is empty and unused.
struct ULam {
  Name var;
  UPtr body;
  Relevance rel;
};
// Irrelevant applications carry no argument: arg is null (m []).
struct UApp {
  UPtr fun;
  UPtr arg;
  Relevance rel;
};
struct UTCon {
  Name dtype;
  std::vector<UPtr> params;
};
// A null term is the placeholder [] left by an erased irrelevant argument.
struct UArg {
  UPtr term;
  bool placeholder() const { return term == nullptr; }
};
struct UDCon {
  Name ctor;
  std::vector<UArg> args;
};
struct UBranch {
  Name ctor;
  std::vector<Name> vars;  // relevant pattern variables only
  UPtr body;
};
struct UCase {
  UPtr scrutinee;
  std::vector<UBranch> branches;
};
struct UEq {
  UPtr lhs;
  UPtr rhs;
};
struct UJoin {};

struct UExpr {
  std::variant<UStar, UVar, URec, UAbort, UPi, ULam, UApp, UTCon, UDCon, UCase,
               UEq, UJoin>
      node;
};

template <class T>
const T* as(const UPtr& e) {
  return std::get_if<T>(&e->node);
}

UPtr u_star();
UPtr u_var(Name n);
UPtr u_rec(Name f, UPtr body);
UPtr u_abort();
UPtr u_pi(Name x, UPtr dom, UPtr cod, Relevance rel = Relevance::Relevant);
UPtr u_lam(Name x, UPtr body);
UPtr u_ilam(UPtr body);
UPtr u_app(UPtr fun, UPtr arg);
UPtr u_iapp(UPtr fun);
UPtr u_tcon(Name d, std::vector<UPtr> params = {});
UPtr u_dcon(Name d, std::vector<UArg> args = {});
UPtr u_case(UPtr scrut, std::vector<UBranch> branches);
UPtr u_eq(UPtr l, UPtr r);
UPtr u_join();

// ---------------------------------------------------------------------------
// Telescopes and datatype declarations
// ---------------------------------------------------------------------------

struct TeleEntry {
  Name var;
  APtr type;
  Relevance rel;
};
using Telescope = std::vector<TeleEntry>;

bool all_relevant(const Telescope& t);

struct CtorDecl {
  Name name;
  Telescope fields;  // result type is implied: D applied to the parameters
};
struct DataDecl {
  Name name;
  Telescope params;  // must be all-relevant once checked
  std::vector<CtorDecl> ctors;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

using ASubst = std::map<Name, APtr>;
using USubst = std::map<Name, UPtr>;

// Simultaneous capture-avoiding substitution.
APtr subst(const APtr& e, const ASubst& sub);
APtr subst(const APtr& e, const Name& x, const APtr& v);
UPtr subst(const UPtr& e, const USubst& sub);
UPtr subst(const UPtr& e, const Name& x, const UPtr& v);

bool alpha_eq(const APtr& a, const APtr& b);
bool alpha_eq(const UPtr& a, const UPtr& b);

std::set<Name> free_vars(const APtr& e);
std::set<Name> free_vars(const UPtr& e);

bool is_value(const APtr& e);
bool is_value(const UPtr& e);

// Outermost type-former tag: "*", "->", "[]->", "=", or a datatype /
// constructor name. Empty optional when undefined.
std::optional<std::string> head_constructor(const UPtr& e);

// Binder-normalized canonical printing; equal strings iff alpha_eq.
std::string ukey(const UPtr& e);

int node_count(const UPtr& e);
int node_count(const APtr& e);

// First name of the form base, base', base'2, ... not in avoid.
Name fresh_name(const Name& base, const std::set<Name>& avoid);

}  // namespace trellys

#include "trellys/meta.hpp"

#include <chrono>

#include "trellys/eval.hpp"
#include "trellys/parallel.hpp"
#include "trellys/prelude.hpp"
#include "trellys/surface.hpp"

namespace trellys {

namespace {

std::optional<std::int64_t> numeral_of(const APtr& e) {
  std::int64_t n = 0;
  const AExpr* cur = e.get();
  while (true) {
    auto* d = std::get_if<ADCon>(&cur->node);
    if (!d || !d->params.empty()) return std::nullopt;
    if (d->ctor == "Z" && d->args.empty()) return n;
    if (d->ctor == "S" && d->args.size() == 1) {
      ++n;
      cur = d->args[0].term.get();
      continue;
    }
    return std::nullopt;
  }
}

APtr numeral(std::int64_t n) {
  APtr acc = a_dcon("Z");
  for (std::int64_t i = 0; i < n; ++i)
    acc = a_dcon("S", {}, {{acc, Relevance::Relevant}});
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

Gen::Gen(const Signature& sig, GenConfig cfg)
    : sig_(sig), cfg_(cfg), rng_(cfg.seed) {}

int Gen::pick(int bound) {
  return static_cast<int>(rng_() % static_cast<std::uint64_t>(bound));
}

APtr Gen::gen_type() {
  switch (pick(10)) {
    case 0:
    case 1:
    case 2:
      return a_tcon("Nat");
    case 3:
    case 4:
      return a_tcon("Bool");
    case 5:
      return a_tcon("Maybe", {a_tcon("Nat")});
    case 6:
      return a_tcon("Vec", {a_tcon("Nat"), numeral(pick(3))});
    case 7: {
      APtr dom = pick(2) ? a_tcon("Nat") : a_tcon("Bool");
      APtr cod = pick(2) ? a_tcon("Nat") : a_tcon("Bool");
      std::set<Name> avoid = {};
      return a_pi("u" + std::to_string(++fresh_), dom, cod);
    }
    default: {
      APtr dom = a_tcon("Nat");
      APtr mid = pick(2) ? a_tcon("Nat") : a_tcon("Bool");
      APtr cod = a_tcon("Nat");
      return a_pi("u" + std::to_string(++fresh_), dom,
                  a_pi("v" + std::to_string(++fresh_), mid, cod));
    }
  }
}

std::optional<APtr> Gen::gen_welltyped(const APtr& type) {
  AContext ctx;
  if (!cfg_.closed) {
    ctx = {{"fx", a_tcon("Nat")},
           {"fb", a_tcon("Bool")},
           {"ff", a_pi("fz", a_tcon("Nat"), a_tcon("Nat"))}};
  }
  for (int attempt = 0; attempt < 16; ++attempt) {
    APtr t = gen_at(ctx, type, cfg_.max_size);
    if (t) return t;
  }
  return std::nullopt;
}

APtr Gen::gen_at(const AContext& ctx, const APtr& type, int budget) {
  // in-scope variables of the right type
  std::vector<APtr> vars;
  for (auto& [n, t] : ctx)
    if (type_eq(t, type)) vars.push_back(a_var(n));

  auto minimal = [&](const APtr& ty, auto&& self) -> APtr {
    if (auto* tc = as<ATCon>(ty)) {
      if (tc->dtype == "Nat") return a_dcon("Z");
      if (tc->dtype == "Bool") return a_dcon("true");
      if (tc->dtype == "Maybe") return a_dcon("Nothing", {tc->params[0]});
      if (tc->dtype == "Vec" && tc->params.size() == 2) {
        auto len = numeral_of(tc->params[1]);
        if (len) {
          APtr a = tc->params[0];
          APtr acc = a_dcon(
              "nil", {a, a_dcon("Z")},
              {{a_join(a_dcon("Z"), a_dcon("Z"), 0, 0), Relevance::Irrelevant}});
          for (std::int64_t i = 1; i <= *len; ++i) {
            APtr n = numeral(i);
            acc = a_dcon("cons", {a, n},
                         {{numeral(i - 1), Relevance::Relevant},
                          {self(a, self), Relevance::Relevant},
                          {acc, Relevance::Relevant},
                          {a_join(n, n, 0, 0), Relevance::Irrelevant}});
          }
          return acc;
        }
      }
    }
    if (auto* pi = as<APi>(ty); pi && pi->rel == Relevance::Relevant) {
      std::set<Name> avoid;
      for (auto& [n, _] : ctx) avoid.insert(n);
      Name x = fresh_name(pi->var.empty() ? "x" : pi->var, avoid);
      APtr body = self(subst(pi->codomain, pi->var, a_var(x)), self);
      return a_lam(x, pi->domain, body);
    }
    if (as<AStar>(ty)) return a_tcon("Nat");
    if (auto* q = as<AEq>(ty)) {
      if (cbv_join(erase(q->lhs), erase(q->rhs), 100, 100))
        return a_join(q->lhs, q->rhs, 100, 100);
    }
    return a_abort(ty);
  };
  auto minimal1 = [&](const APtr& ty) {
    auto self = [&](const APtr& t, auto&& s) -> APtr { return minimal(t, s); };
    return minimal(ty, self);
  };

  if (budget <= 1) {
    if (!vars.empty() && pick(2)) return vars[pick((int)vars.size())];
    return minimal1(type);
  }

  int total = cfg_.w_value + cfg_.w_app + cfg_.w_case + cfg_.w_other;
  int roll = pick(total);

  if (!vars.empty() && pick(4) == 0) return vars[pick((int)vars.size())];

  if (roll < cfg_.w_value) {
    // head-constructor forms of the target type
    if (auto* tc = as<ATCon>(type)) {
      if (tc->dtype == "Nat") {
        if (pick(3) == 0) return a_dcon("Z");
        APtr inner = gen_at(ctx, type, budget - 1);
        return inner ? a_dcon("S", {}, {{inner, Relevance::Relevant}})
                     : nullptr;
      }
      if (tc->dtype == "Bool") return a_dcon(pick(2) ? "true" : "false");
      if (tc->dtype == "Maybe") {
        if (pick(2)) return a_dcon("Nothing", {tc->params[0]});
        APtr inner = gen_at(ctx, tc->params[0], budget - 1);
        return inner ? a_dcon("Just", {tc->params[0]},
                              {{inner, Relevance::Relevant}})
                     : nullptr;
      }
      return minimal1(type);
    }
    if (auto* pi = as<APi>(type); pi && pi->rel == Relevance::Relevant) {
      std::set<Name> avoid;
      for (auto& [n, _] : ctx) avoid.insert(n);
      Name x = fresh_name(pi->var.empty() ? "x" : pi->var, avoid);
      APtr cod = subst(pi->codomain, pi->var, a_var(x));
      if (pick(4) == 0) {
        // diverging recursive function
        avoid.insert(x);
        Name f = fresh_name("f", avoid);
        return a_rec(f, type,
                     a_lam(x, pi->domain, a_app(a_var(f), a_var(x))));
      }
      AContext ctx2 = ctx;
      ctx2.emplace_back(x, pi->domain);
      APtr body = gen_at(ctx2, cod, budget - 1);
      return body ? a_lam(x, pi->domain, body) : nullptr;
    }
    if (as<AStar>(type)) return gen_type();
    return minimal1(type);
  }
  if (roll < cfg_.w_value + cfg_.w_app) {
    // an application at the target type
    APtr argty = pick(2) ? a_tcon("Nat") : a_tcon("Bool");
    std::set<Name> avoid;
    for (auto& [n, _] : ctx) avoid.insert(n);
    auto tfv = free_vars(type);
    avoid.insert(tfv.begin(), tfv.end());
    APtr fty = a_pi(fresh_name("z", avoid), argty, type);
    APtr f = gen_at(ctx, fty, budget / 2);
    APtr arg = gen_at(ctx, argty, budget / 2);
    if (!f || !arg) return nullptr;
    return a_app(f, arg);
  }
  if (roll < cfg_.w_value + cfg_.w_app + cfg_.w_case) {
    std::set<Name> avoid;
    for (auto& [n, _] : ctx) avoid.insert(n);
    auto tfv = free_vars(type);
    avoid.insert(tfv.begin(), tfv.end());
    Name w = fresh_name("w", avoid);
    if (pick(2)) {
      APtr scrut = gen_at(ctx, a_tcon("Bool"), budget / 3);
      APtr t1 = gen_at(ctx, type, budget / 2);
      APtr t2 = gen_at(ctx, type, budget / 2);
      if (!scrut || !t1 || !t2) return nullptr;
      return a_case(scrut, w,
                    {{"true", {}, t1}, {"false", {}, t2}});
    }
    APtr scrut = gen_at(ctx, a_tcon("Nat"), budget / 3);
    APtr t1 = gen_at(ctx, type, budget / 2);
    avoid.insert(w);
    Name k = fresh_name("k", avoid);
    AContext ctx2 = ctx;
    ctx2.emplace_back(k, a_tcon("Nat"));
    APtr t2 = gen_at(ctx2, type, budget / 2);
    if (!scrut || !t1 || !t2) return nullptr;
    return a_case(scrut, w,
                  {{"Z", {}, t1}, {"S", {{k, Relevance::Relevant}}, t2}});
  }
  // other: conv wrapping and abort
  if (pick(3) == 0) return a_abort(type);
  APtr inner = gen_at(ctx, type, budget - 2);
  if (!inner) return nullptr;
  return a_conv(inner, {{a_join(type, type, 0, 0), nullptr, nullptr}}, {"#1"},
                a_var("#1"));
}

UPtr Gen::gen_u(std::vector<Name>& scope, int budget) {
  if (budget <= 1) {
    switch (pick(5)) {
      case 0:
        return u_star();
      case 1:
        return u_join();
      case 2:
        return u_dcon("Z");
      case 3:
        return u_abort();
      default:
        if (!scope.empty()) return u_var(scope[pick((int)scope.size())]);
        return u_dcon("true");
    }
  }
  switch (pick(12)) {
    case 0: {
      Name x = "x" + std::to_string(++fresh_);
      scope.push_back(x);
      UPtr b = gen_u(scope, budget - 1);
      scope.pop_back();
      return u_lam(x, b);
    }
    case 1:
      return u_ilam(gen_u(scope, budget - 1));
    case 2: {
      UPtr f = gen_u(scope, budget / 2);
      UPtr a = gen_u(scope, budget / 2);
      return u_app(f, a);
    }
    case 3:
      return u_iapp(gen_u(scope, budget - 1));
    case 4: {
      Name f = "f" + std::to_string(++fresh_);
      scope.push_back(f);
      UPtr b = gen_u(scope, budget - 1);
      scope.pop_back();
      return u_rec(f, b);
    }
    case 5:
      return u_dcon("S", {{gen_u(scope, budget - 1)}});
    case 6: {
      UPtr l = gen_u(scope, budget / 2);
      UPtr r = gen_u(scope, budget / 2);
      return u_eq(l, r);
    }
    case 7: {
      UPtr scrut = gen_u(scope, budget / 2);
      Name k = "k" + std::to_string(++fresh_);
      UPtr z = gen_u(scope, budget / 4 + 1);
      scope.push_back(k);
      UPtr s = gen_u(scope, budget / 4 + 1);
      scope.pop_back();
      return u_case(scrut, {{"Z", {}, z}, {"S", {k}, s}});
    }
    case 8: {
      UPtr dom = gen_u(scope, budget / 2);
      Name x = "x" + std::to_string(++fresh_);
      scope.push_back(x);
      UPtr cod = gen_u(scope, budget / 2);
      scope.pop_back();
      return u_pi(x, dom, cod);
    }
    case 9:
      return u_abort();
    case 10:
      return u_dcon(pick(2) ? "true" : "false");
    default:
      if (!scope.empty()) return u_var(scope[pick((int)scope.size())]);
      return u_dcon("Z");
  }
}

UPtr Gen::gen_uexpr(int max_nodes) {
  std::vector<Name> scope;
  for (int i = 0; i < 32; ++i) {
    UPtr t = gen_u(scope, max_nodes);
    if (node_count(t) <= max_nodes) return t;
  }
  return u_dcon("Z");
}

// ---------------------------------------------------------------------------
// Erased signatures and derivations
// ---------------------------------------------------------------------------

const UDataDecl* USignature::datatype(const Name& n) const {
  for (auto& d : datatypes)
    if (d.name == n) return &d;
  return nullptr;
}

std::optional<USignature::CtorRef> USignature::ctor(const Name& n) const {
  for (auto& d : datatypes)
    for (auto& c : d.ctors)
      if (c.name == n) return CtorRef{&d, &c};
  return std::nullopt;
}

USignature erase_signature(const Signature& sig) {
  USignature out;
  for (auto& d : sig.datatypes()) out.datatypes.push_back(erase_datatype(d));
  return out;
}

namespace {

UDerivPtr make_unode(const DerivPtr& d, std::string rule,
                     std::vector<UDerivPtr> children,
                     std::vector<Name> conv_vars = {},
                     UPtr conv_template = nullptr, std::int64_t aux = 0) {
  auto u = std::make_shared<UDerivation>();
  u->rule = std::move(rule);
  u->ctx = erase_context(d->ctx);
  u->subject = erase(d->subject);
  u->type = erase(d->type);
  u->children = std::move(children);
  u->conv_vars = std::move(conv_vars);
  u->conv_template = conv_template;
  u->aux_index = aux;
  return u;
}

}  // namespace

UDerivPtr erase_derivation(const DerivPtr& d) {
  auto kids = [&](std::initializer_list<size_t> idx) {
    std::vector<UDerivPtr> out;
    for (size_t i : idx) out.push_back(erase_derivation(d->children[i]));
    return out;
  };
  auto all_kids = [&]() {
    std::vector<UDerivPtr> out;
    for (auto& c : d->children) out.push_back(erase_derivation(c));
    return out;
  };
  const std::string& r = d->rule;
  if (r == "t_type") return make_unode(d, "et_type", {});
  if (r == "t_var") return make_unode(d, "et_var", {});
  if (r == "t_pi") return make_unode(d, "et_pi", all_kids());
  if (r == "t_ipi") return make_unode(d, "et_ipi", all_kids());
  if (r == "t_abs") return make_unode(d, "et_abs", kids({1}));
  if (r == "t_iabs") return make_unode(d, "et_iabs", kids({1}));
  if (r == "t_rec") return make_unode(d, "et_rec", kids({1}));
  if (r == "t_app") return make_unode(d, "et_app", all_kids());
  if (r == "t_iapp") return make_unode(d, "et_iapp", kids({0, 1}));
  if (r == "t_abort") return make_unode(d, "et_abort", all_kids());
  if (r == "t_eq") return make_unode(d, "et_eq", all_kids());
  if (r == "t_join") return make_unode(d, "et_join", all_kids());
  if (r == "t_injdom") return make_unode(d, "et_injdom", all_kids());
  if (r == "t_iinjdom") return make_unode(d, "et_iinjdom", all_kids());
  if (r == "t_injrng") return make_unode(d, "et_injrng", all_kids());
  if (r == "t_iinjrng") return make_unode(d, "et_iinjrng", all_kids());
  if (r == "t_injtcon") {
    auto* node = as<AInjTCon>(d->subject);
    return make_unode(d, "et_injtcon", all_kids(), {}, nullptr,
                      node ? node->index : 0);
  }
  if (r == "t_tcon") return make_unode(d, "et_tcon", all_kids());
  if (r == "t_dcon") return make_unode(d, "et_dcon", all_kids());
  if (r == "t_case") return make_unode(d, "et_case", all_kids());
  if (r == "t_conv") {
    auto* c = as<AConv>(d->subject);
    // children: per-proof (1 for values, 2 for annotations), subject, kind
    std::vector<UDerivPtr> children;
    std::vector<Name> vars;
    size_t at = 0;
    for (size_t i = 0; i < c->proofs.size(); ++i) {
      if (c->proofs[i].is_value_proof()) {
        children.push_back(erase_derivation(d->children[at]));
        vars.push_back(d->conv_vars[i]);
        at += 1;
      } else {
        at += 2;  // annotation proofs vanish with the erased positions
      }
    }
    UDerivPtr subject = erase_derivation(d->children[at]);
    if (vars.empty()) {
      // Fully irrelevant conversion: the erased derivation is the subject's,
      // whose conclusion type is alpha-equal to the erased result.
      return subject;
    }
    UDerivPtr kind = erase_derivation(d->children[at + 1]);
    children.push_back(subject);
    children.push_back(kind);
    return make_unode(d, "et_conv", std::move(children), std::move(vars),
                      erase(d->conv_template));
  }
  // Unknown rule: keep the shape so the validator reports it.
  return make_unode(d, "et_unknown:" + r, all_kids());
}

// ---------------------------------------------------------------------------
// Derivation validation
// ---------------------------------------------------------------------------

namespace {

struct Validator {
  const USignature& usig;
  const std::vector<std::pair<Name, UPtr>>& unfolds;
  ValidateFuel fuel;
  ValidateResult failure{true, "", ""};

  bool fail(const std::string& path, const std::string& reason) {
    if (failure.ok) failure = {false, path, reason};
    return false;
  }

  UPtr unfold(const UPtr& m) const {
    if (unfolds.empty()) return m;
    USubst sub;
    for (auto& [n, u] : unfolds) sub[n] = u;
    return subst(m, sub);
  }

  static bool ctx_extends(const UContext& base, const UContext& ext,
                          const UContext& child) {
    if (child.size() != base.size() + ext.size()) return false;
    for (size_t i = 0; i < base.size(); ++i) {
      if (child[i].first != base[i].first) return false;
      if (!alpha_eq(child[i].second, base[i].second)) return false;
    }
    for (size_t i = 0; i < ext.size(); ++i) {
      if (child[base.size() + i].first != ext[i].first) return false;
      if (!alpha_eq(child[base.size() + i].second, ext[i].second)) return false;
    }
    return true;
  }

  bool join_holds(const UPtr& l, const UPtr& r) {
    UPtr lu = unfold(l), ru = unfold(r);
    if (cbv_join(lu, ru, fuel.cbv_bound, fuel.cbv_bound)) return true;
    try {
      return joinable(lu, ru, fuel.parallel_depth);
    } catch (const BudgetExceeded&) {
      return false;
    }
  }

  bool check(const UDerivPtr& d, const std::string& path) {
    auto child = [&](size_t i) { return d->children[i]; };
    auto sub = [&](size_t i) { return path + "." + std::to_string(i); };
    auto need_children = [&](size_t n) {
      if (d->children.size() != n)
        return fail(path, d->rule + " expects " + std::to_string(n) +
                              " premise(s), has " +
                              std::to_string(d->children.size()));
      for (size_t i = 0; i < n; ++i)
        if (!check(d->children[i], sub(i))) return false;
      return true;
    };
    auto same_ctx = [&](size_t i) {
      return ctx_extends(d->ctx, {}, child(i)->ctx);
    };

    const std::string& r = d->rule;
    if (r == "et_type") {
      if (!need_children(0)) return false;
      if (!as<UStar>(d->subject) || !as<UStar>(d->type))
        return fail(path, "et_type concludes * : *");
      return true;
    }
    if (r == "et_var") {
      if (!need_children(0)) return false;
      auto* v = as<UVar>(d->subject);
      if (!v) return fail(path, "et_var subject must be a variable");
      for (size_t i = d->ctx.size(); i-- > 0;) {
        if (d->ctx[i].first == v->name)
          return alpha_eq(d->ctx[i].second, d->type)
                     ? true
                     : fail(path, "variable type does not match the context");
      }
      return fail(path, "unbound variable " + v->name);
    }
    if (r == "et_pi" || r == "et_ipi") {
      if (!need_children(2)) return false;
      auto* p = as<UPi>(d->subject);
      if (!p || (r == "et_pi") != (p->rel == Relevance::Relevant))
        return fail(path, "subject must be an arrow of matching relevance");
      if (!as<UStar>(d->type)) return fail(path, "arrow types have type *");
      if (!same_ctx(0) || !alpha_eq(child(0)->subject, p->domain) ||
          !as<UStar>(child(0)->type))
        return fail(path, "domain premise mismatch");
      if (!ctx_extends(d->ctx, {{p->var, p->domain}}, child(1)->ctx) ||
          !alpha_eq(child(1)->subject, p->codomain) ||
          !as<UStar>(child(1)->type))
        return fail(path, "codomain premise mismatch");
      return true;
    }
    if (r == "et_abs" || r == "et_iabs") {
      if (!need_children(1)) return false;
      auto* l = as<ULam>(d->subject);
      auto* p = as<UPi>(d->type);
      bool relevant = r == "et_abs";
      if (!l || !p || (relevant != (l->rel == Relevance::Relevant)) ||
          (relevant != (p->rel == Relevance::Relevant)))
        return fail(path, "subject/type shape mismatch for " + r);
      if (!ctx_extends(d->ctx, {{p->var, p->domain}}, child(0)->ctx))
        return fail(path, "body premise context mismatch");
      if (!alpha_eq(child(0)->subject, l->body) ||
          !alpha_eq(child(0)->type, p->codomain))
        return fail(path, "body premise mismatch");
      if (relevant && l->var != p->var)
        return fail(path, "binder names disagree");
      if (!relevant && free_vars(l->body).count(p->var))
        return fail(path, "irrelevant binder occurs free in the body");
      return true;
    }
    if (r == "et_rec") {
      if (!need_children(1)) return false;
      auto* rec = as<URec>(d->subject);
      auto* p = as<UPi>(d->type);
      if (!rec || !p) return fail(path, "et_rec needs rec : arrow");
      if (!is_value(rec->body))
        return fail(path, "rec body must be a value");
      if (!ctx_extends(d->ctx, {{rec->f, d->type}}, child(0)->ctx) ||
          !alpha_eq(child(0)->subject, rec->body) ||
          !alpha_eq(child(0)->type, d->type))
        return fail(path, "rec body premise mismatch");
      return true;
    }
    if (r == "et_app") {
      if (!need_children(3)) return false;
      auto* ap = as<UApp>(d->subject);
      if (!ap || ap->rel != Relevance::Relevant)
        return fail(path, "et_app subject must be an application");
      auto* p = as<UPi>(child(0)->type);
      if (!p || p->rel != Relevance::Relevant)
        return fail(path, "function premise is not an arrow");
      if (!same_ctx(0) || !same_ctx(1) || !same_ctx(2))
        return fail(path, "premise context mismatch");
      if (!alpha_eq(child(0)->subject, ap->fun) ||
          !alpha_eq(child(1)->subject, ap->arg))
        return fail(path, "premise subjects mismatch");
      if (!alpha_eq(child(1)->type, p->domain))
        return fail(path, "argument type mismatch");
      UPtr result = subst(p->codomain, p->var, ap->arg);
      if (!alpha_eq(child(2)->subject, result) || !as<UStar>(child(2)->type))
        return fail(path, "result kind premise mismatch");
      if (!alpha_eq(d->type, result))
        return fail(path, "conclusion type mismatch");
      return true;
    }
    if (r == "et_iapp") {
      if (!need_children(2)) return false;
      auto* ap = as<UApp>(d->subject);
      if (!ap || ap->rel != Relevance::Irrelevant)
        return fail(path, "et_iapp subject must be an irrelevant application");
      auto* p = as<UPi>(child(0)->type);
      if (!p || p->rel != Relevance::Irrelevant)
        return fail(path, "function premise is not an irrelevant arrow");
      if (!same_ctx(0) || !same_ctx(1))
        return fail(path, "premise context mismatch");
      if (!alpha_eq(child(0)->subject, ap->fun))
        return fail(path, "function subject mismatch");
      const UPtr& witness = child(1)->subject;
      if (!is_value(witness))
        return fail(path, "irrelevant argument witness is not a value");
      if (!alpha_eq(child(1)->type, p->domain))
        return fail(path, "witness type mismatch");
      if (!alpha_eq(d->type, subst(p->codomain, p->var, witness)))
        return fail(path, "conclusion type mismatch");
      return true;
    }
    if (r == "et_abort") {
      if (!need_children(1)) return false;
      if (!as<UAbort>(d->subject)) return fail(path, "subject must be abort");
      if (!same_ctx(0) || !alpha_eq(child(0)->subject, d->type) ||
          !as<UStar>(child(0)->type))
        return fail(path, "kind premise mismatch");
      return true;
    }
    if (r == "et_eq") {
      if (!need_children(2)) return false;
      auto* q = as<UEq>(d->subject);
      if (!q || !as<UStar>(d->type))
        return fail(path, "et_eq concludes (m = n) : *");
      if (!same_ctx(0) || !same_ctx(1) ||
          !alpha_eq(child(0)->subject, q->lhs) ||
          !alpha_eq(child(1)->subject, q->rhs))
        return fail(path, "side premises mismatch");
      return true;
    }
    if (r == "et_join") {
      if (!need_children(1)) return false;
      if (!as<UJoin>(d->subject)) return fail(path, "subject must be join");
      auto* q = as<UEq>(d->type);
      if (!q) return fail(path, "join concludes an equation");
      if (!same_ctx(0) || !alpha_eq(child(0)->subject, d->type) ||
          !as<UStar>(child(0)->type))
        return fail(path, "equation kind premise mismatch");
      if (!join_holds(q->lhs, q->rhs))
        return fail(path, "the equated terms do not join");
      return true;
    }
    if (r == "et_conv") {
      size_t n = d->conv_vars.size();
      if (!need_children(n + 2)) return false;
      USubst lhs, rhs;
      for (size_t i = 0; i < n; ++i) {
        if (!same_ctx(i)) return fail(path, "proof premise context mismatch");
        if (!is_value(child(i)->subject))
          return fail(path, "conversion proof is not a value");
        auto* q = as<UEq>(child(i)->type);
        if (!q) return fail(path, "conversion proof proves no equation");
        lhs[d->conv_vars[i]] = q->lhs;
        rhs[d->conv_vars[i]] = q->rhs;
      }
      const UDerivPtr& subject = child(n);
      const UDerivPtr& kind = child(n + 1);
      if (!same_ctx(n) || !same_ctx(n + 1))
        return fail(path, "premise context mismatch");
      if (!alpha_eq(subject->subject, d->subject))
        return fail(path, "subject premise mismatch");
      if (!alpha_eq(subject->type, subst(d->conv_template, lhs)))
        return fail(path, "subject type does not match the template");
      UPtr to = subst(d->conv_template, rhs);
      if (!alpha_eq(kind->subject, to) || !as<UStar>(kind->type))
        return fail(path, "target kind premise mismatch");
      if (!alpha_eq(d->type, to))
        return fail(path, "conclusion type mismatch");
      return true;
    }
    if (r == "et_injdom" || r == "et_iinjdom" || r == "et_injrng" ||
        r == "et_iinjrng") {
      bool rng = r == "et_injrng" || r == "et_iinjrng";
      bool relevant = r == "et_injdom" || r == "et_injrng";
      if (!need_children(rng ? 2 : 1)) return false;
      if (!as<UJoin>(d->subject)) return fail(path, "subject must be join");
      auto* q = as<UEq>(child(0)->type);
      const UPi *l = nullptr, *rr = nullptr;
      if (q) {
        l = as<UPi>(q->lhs);
        rr = as<UPi>(q->rhs);
      }
      if (!l || !rr || l->rel != rr->rel ||
          (relevant != (l->rel == Relevance::Relevant)))
        return fail(path, "proof premise is not an arrow equation");
      if (!same_ctx(0)) return fail(path, "premise context mismatch");
      if (!rng) {
        if (!alpha_eq(d->type, u_eq(l->domain, rr->domain)))
          return fail(path, "conclusion is not the domain equation");
        return true;
      }
      if (!same_ctx(1)) return fail(path, "premise context mismatch");
      const UPtr& w = child(1)->subject;
      if (!is_value(w)) return fail(path, "witness is not a value");
      if (!alpha_eq(child(1)->type, l->domain))
        return fail(path, "witness type mismatch");
      UPtr want = u_eq(subst(l->codomain, l->var, w),
                       subst(rr->codomain, rr->var, w));
      if (!alpha_eq(d->type, want))
        return fail(path, "conclusion is not the range equation");
      return true;
    }
    if (r == "et_injtcon") {
      if (!need_children(1)) return false;
      if (!as<UJoin>(d->subject)) return fail(path, "subject must be join");
      auto* q = as<UEq>(child(0)->type);
      const UTCon *l = nullptr, *rr = nullptr;
      if (q) {
        l = as<UTCon>(q->lhs);
        rr = as<UTCon>(q->rhs);
      }
      if (!l || !rr || l->dtype != rr->dtype ||
          l->params.size() != rr->params.size())
        return fail(path, "proof premise is not a datatype equation");
      std::int64_t k = d->aux_index;
      if (k < 1 || k > static_cast<std::int64_t>(l->params.size()))
        return fail(path, "injtcon index out of range");
      if (!same_ctx(0)) return fail(path, "premise context mismatch");
      if (!alpha_eq(d->type, u_eq(l->params[k - 1], rr->params[k - 1])))
        return fail(path, "conclusion is not the parameter equation");
      return true;
    }
    if (r == "et_tcon") {
      auto* t = as<UTCon>(d->subject);
      if (!t) return fail(path, "subject must be a type constructor");
      const UDataDecl* decl = usig.datatype(t->dtype);
      if (!decl) return fail(path, "unknown datatype " + t->dtype);
      if (!need_children(decl->params.size())) return false;
      if (t->params.size() != decl->params.size())
        return fail(path, "parameter count mismatch");
      USubst subm;
      for (size_t i = 0; i < decl->params.size(); ++i) {
        if (!same_ctx(i)) return fail(path, "premise context mismatch");
        if (!alpha_eq(child(i)->subject, t->params[i]))
          return fail(path, "parameter premise subject mismatch");
        if (!alpha_eq(child(i)->type, subst(decl->params[i].type, subm)))
          return fail(path, "parameter type mismatch");
        subm[decl->params[i].var] = t->params[i];
      }
      if (!as<UStar>(d->type)) return fail(path, "conclusion must be *");
      return true;
    }
    if (r == "et_dcon") {
      auto* dc = as<UDCon>(d->subject);
      if (!dc) return fail(path, "subject must be a constructor application");
      auto ref = usig.ctor(dc->ctor);
      if (!ref) return fail(path, "unknown constructor " + dc->ctor);
      size_t np = ref->data->params.size();
      size_t nf = ref->ctor->fields.size();
      if (!need_children(np + nf)) return false;
      if (dc->args.size() != nf)
        return fail(path, "argument count mismatch");
      USubst subm;
      std::vector<UPtr> params;
      for (size_t i = 0; i < np; ++i) {
        if (!same_ctx(i)) return fail(path, "premise context mismatch");
        if (!alpha_eq(child(i)->type, subst(ref->data->params[i].type, subm)))
          return fail(path, "parameter type mismatch");
        params.push_back(child(i)->subject);
        subm[ref->data->params[i].var] = child(i)->subject;
      }
      for (size_t i = 0; i < nf; ++i) {
        const UTeleEntry& f = ref->ctor->fields[i];
        const UDerivPtr& c = child(np + i);
        if (!same_ctx(np + i)) return fail(path, "premise context mismatch");
        if (f.rel == Relevance::Irrelevant) {
          if (!dc->args[i].placeholder())
            return fail(path, "irrelevant argument should be a placeholder");
          if (!is_value(c->subject))
            return fail(path, "irrelevant argument witness is not a value");
        } else {
          if (dc->args[i].placeholder() ||
              !alpha_eq(c->subject, dc->args[i].term))
            return fail(path, "argument premise subject mismatch");
        }
        if (!alpha_eq(c->type, subst(f.type, subm)))
          return fail(path, "argument type mismatch");
        subm[f.var] = c->subject;
      }
      if (!alpha_eq(d->type, u_tcon(ref->data->name, params)))
        return fail(path, "conclusion type mismatch");
      return true;
    }
    if (r == "et_case") {
      auto* cs = as<UCase>(d->subject);
      if (!cs) return fail(path, "subject must be a case");
      auto* scrut_t = as<UTCon>(child(0)->type);
      if (d->children.size() < 2) return fail(path, "missing premises");
      if (!check(child(0), sub(0))) return false;
      if (!same_ctx(0) || !alpha_eq(child(0)->subject, cs->scrutinee))
        return fail(path, "scrutinee premise mismatch");
      if (!scrut_t) return fail(path, "scrutinee type is not a datatype");
      const UDataDecl* decl = usig.datatype(scrut_t->dtype);
      if (!decl) return fail(path, "unknown datatype " + scrut_t->dtype);
      if (scrut_t->params.size() != decl->params.size())
        return fail(path, "scrutinee type is not fully applied");
      if (d->children.size() != decl->ctors.size() + 2)
        return fail(path, "premise count mismatch");
      if (cs->branches.size() != decl->ctors.size())
        return fail(path, "branch count mismatch");
      for (size_t ci = 0; ci < decl->ctors.size(); ++ci) {
        const UCtorDecl& ct = decl->ctors[ci];
        const UBranch* br = nullptr;
        for (auto& b : cs->branches)
          if (b.ctor == ct.name) br = &b;
        if (!br) return fail(path, "missing branch for " + ct.name);
        const UDerivPtr& body = child(1 + ci);
        if (!check(body, sub(1 + ci))) return false;
        size_t base = d->ctx.size();
        if (body->ctx.size() != base + ct.fields.size() + 1)
          return fail(path, "branch context size mismatch for " + ct.name);
        // rebuild the expected context extension
        USubst subm;
        for (size_t i = 0; i < decl->params.size(); ++i)
          subm[decl->params[i].var] = scrut_t->params[i];
        UContext ext;
        std::vector<UArg> pat_args;
        size_t rel_idx = 0;
        for (size_t i = 0; i < ct.fields.size(); ++i) {
          Name n;
          if (ct.fields[i].rel == Relevance::Relevant) {
            if (rel_idx >= br->vars.size())
              return fail(path, "branch binds too few variables");
            n = br->vars[rel_idx++];
            pat_args.push_back({u_var(n)});
          } else {
            n = body->ctx[base + i].first;
            pat_args.push_back({nullptr});
          }
          ext.push_back({n, subst(ct.fields[i].type, subm)});
          subm[ct.fields[i].var] = u_var(n);
        }
        if (rel_idx != br->vars.size())
          return fail(path, "branch binds too many variables");
        Name y = body->ctx[base + ct.fields.size()].first;
        ext.push_back(
            {y, u_eq(cs->scrutinee, u_dcon(ct.name, pat_args))});
        if (!ctx_extends(d->ctx, ext, body->ctx))
          return fail(path, "branch context mismatch for " + ct.name);
        if (!alpha_eq(body->subject, br->body))
          return fail(path, "branch body premise mismatch");
        if (!alpha_eq(body->type, d->type))
          return fail(path, "branch result type mismatch");
        auto bfv = free_vars(br->body);
        for (size_t i = 0; i < ct.fields.size(); ++i)
          if (ct.fields[i].rel == Relevance::Irrelevant &&
              bfv.count(ext[i].first))
            return fail(path, "irrelevant pattern variable " + ext[i].first +
                                  " used in the branch body");
        if (bfv.count(y))
          return fail(path, "equation variable used in the branch body");
      }
      const UDerivPtr& kind = child(d->children.size() - 1);
      if (!check(kind, sub(d->children.size() - 1))) return false;
      if (!ctx_extends(d->ctx, {}, kind->ctx) ||
          !alpha_eq(kind->subject, d->type) || !as<UStar>(kind->type))
        return fail(path, "result kind premise mismatch");
      return true;
    }
    return fail(path, "unknown rule " + r);
  }
};

}  // namespace

ValidateResult validate_uderivation(
    const UDerivPtr& d, const USignature& usig,
    const std::vector<std::pair<Name, UPtr>>& unfolds, ValidateFuel fuel) {
  Validator v{usig, unfolds, fuel};
  // root context must be well-scoped
  std::set<Name> names;
  for (auto& [n, t] : d->ctx) {
    for (auto& fv : free_vars(t))
      if (!names.count(fv))
        return {false, "root", "context type of " + n +
                                   " mentions unbound " + fv};
    names.insert(n);
  }
  bool ok = v.check(d, "root");
  if (ok) return {true, "", ""};
  return v.failure;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

const Signature& empty_signature() {
  static const Signature sig;
  return sig;
}

}  // namespace

SuiteReport progress_suite(const Signature& sig, int cases, std::uint64_t fuel,
                           std::uint64_t seed) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "progress";
  Gen g(sig, {seed});
  for (int i = 0; i < cases; ++i) {
    ++rep.cases;
    auto term = g.gen_welltyped(g.gen_type());
    if (!term) {
      ++rep.skipped;
      continue;
    }
    RunResult r = run(erase(*term), fuel);
    if (r.outcome == Outcome::Stuck) {
      ++rep.failed;
      if (rep.counterexamples.size() < 5) {
        APtr small = shrink_welltyped(sig, *term, [&](const APtr& c) {
          return run(erase(c), fuel).outcome == Outcome::Stuck;
        });
        rep.counterexamples.push_back(pretty(small) + "  -- stuck: " +
                                      r.stuck_reason);
      }
    } else {
      ++rep.passed;
    }
  }
  rep.seconds = timer.elapsed();
  return rep;
}

SuiteReport diamond_suite(int cases, std::uint64_t seed) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "diamond";
  Gen g(empty_signature(), {seed});
  for (int i = 0; i < cases; ++i) {
    ++rep.cases;
    UPtr t = g.gen_uexpr(12);
    try {
      DiamondResult r = diamond_check(t);
      if (r.ok) {
        ++rep.passed;
      } else {
        ++rep.failed;
        if (rep.counterexamples.size() < 5)
          rep.counterexamples.push_back(pretty(t) + "  -- reducts " +
                                        pretty(r.m1) + " and " + pretty(r.m2) +
                                        " do not rejoin");
      }
    } catch (const BudgetExceeded&) {
      ++rep.skipped;
    }
  }
  rep.seconds = timer.elapsed();
  return rep;
}

SuiteReport canonical_forms_suite(const Signature& sig, int cases,
                                  std::uint64_t seed) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "canonical-forms";
  Gen g(sig, {seed});
  for (int i = 0; i < cases; ++i) {
    ++rep.cases;
    APtr type = g.gen_type();
    auto term = g.gen_welltyped(type);
    if (!term) {
      ++rep.skipped;
      continue;
    }
    RunResult r = run(erase(*term), 2000);
    if (r.outcome == Outcome::Stuck) {
      ++rep.failed;
      if (rep.counterexamples.size() < 5)
        rep.counterexamples.push_back(pretty(*term) + "  -- stuck");
      continue;
    }
    if (r.outcome != Outcome::Value) {
      ++rep.passed;  // abort / out of fuel: nothing to check
      continue;
    }
    auto head = head_constructor(erase(type));
    bool ok = true;
    std::string why;
    if (head == std::optional<std::string>("->")) {
      auto* l = as<ULam>(r.final);
      ok = (l && l->rel == Relevance::Relevant) || as<URec>(r.final) != nullptr;
      why = "value at an arrow type is not a lambda or rec";
    } else if (head == std::optional<std::string>("[]->")) {
      auto* l = as<ULam>(r.final);
      ok = (l && l->rel == Relevance::Irrelevant) ||
           as<URec>(r.final) != nullptr;
      why = "value at an irrelevant arrow type is not a lambda or rec";
    } else if (head && sig.datatype(*head)) {
      auto* dc = as<UDCon>(r.final);
      ok = false;
      if (dc) {
        for (auto& c : sig.datatype(*head)->ctors)
          if (c.name == dc->ctor) ok = true;
      }
      why = "value at datatype " + *head + " is not one of its constructors";
    }
    if (ok) {
      ++rep.passed;
    } else {
      ++rep.failed;
      if (rep.counterexamples.size() < 5)
        rep.counterexamples.push_back(pretty(*term) + " : " + pretty(type) +
                                      " evaluated to " + pretty(r.final) +
                                      "  -- " + why);
    }
  }
  rep.seconds = timer.elapsed();
  return rep;
}

SuiteReport erasure_soundness_suite(const Signature& sig, int cases,
                                    std::uint64_t seed) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "erasure-soundness";
  Gen g(sig, {seed});
  USignature usig = erase_signature(sig);
  Checker ck(sig);
  for (int i = 0; i < cases; ++i) {
    ++rep.cases;
    auto term = g.gen_welltyped(g.gen_type());
    if (!term) {
      ++rep.skipped;
      continue;
    }
    try {
      InferResult r = ck.infer(*term);
      UDerivPtr ud = erase_derivation(r.deriv);
      ValidateResult vr = validate_uderivation(ud, usig, ck.unfolds());
      if (vr.ok) {
        ++rep.passed;
      } else {
        ++rep.failed;
        if (rep.counterexamples.size() < 5)
          rep.counterexamples.push_back(pretty(*term) + "  -- " + vr.path +
                                        ": " + vr.reason);
      }
    } catch (const TypeError& e) {
      ++rep.failed;
      if (rep.counterexamples.size() < 5)
        rep.counterexamples.push_back(pretty(*term) +
                                      "  -- generator emitted ill-typed term: " +
                                      e.what());
    }
  }
  rep.seconds = timer.elapsed();
  return rep;
}

SuiteReport subst_lemma_suite(int cases, std::uint64_t seed) {
  Timer timer;
  SuiteReport rep;
  rep.suite = "subst-lemmas";
  Gen g(empty_signature(), {seed});
  auto member = [](const std::vector<UPtr>& set, const UPtr& t) {
    std::string key = ukey(t);
    for (auto& s : set)
      if (ukey(s) == key) return true;
    return false;
  };
  for (int i = 0; i < cases; ++i) {
    ++rep.cases;
    try {
      UPtr bigM = g.gen_uexpr(8);
      UPtr n = g.gen_uexpr(6);
      auto n_reds = parallel_reducts(n);
      UPtr n2 = n_reds[g.rng()() % n_reds.size()];
      // Substitution of ~>p: [n/x]M ~>p [n'/x]M
      UPtr before = subst(bigM, "a", n);
      UPtr after = subst(bigM, "a", n2);
      if (!member(parallel_reducts(before), after)) {
        ++rep.failed;
        if (rep.counterexamples.size() < 5)
          rep.counterexamples.push_back("of: M=" + pretty(bigM) +
                                        " N=" + pretty(n) +
                                        " N'=" + pretty(n2));
        continue;
      }
      // Substitution into ~>p: values only
      UPtr u = g.gen_uexpr(6);
      if (!is_value(u)) u = u_lam("xv", u);
      auto u_reds = parallel_reducts(u);
      UPtr u2 = u_reds[g.rng()() % u_reds.size()];
      auto m_reds = parallel_reducts(bigM);
      UPtr m2 = m_reds[g.rng()() % m_reds.size()];
      UPtr from = subst(bigM, "a", u);
      UPtr to = subst(m2, "a", u2);
      if (!member(parallel_reducts(from), to)) {
        ++rep.failed;
        if (rep.counterexamples.size() < 5)
          rep.counterexamples.push_back("into: m=" + pretty(bigM) +
                                        " u=" + pretty(u));
        continue;
      }
      ++rep.passed;
    } catch (const BudgetExceeded&) {
      ++rep.skipped;
    }
  }
  rep.seconds = timer.elapsed();
  return rep;
}

SuiteReport run_suite(const Signature& sig, const std::string& name, int cases,
                      std::uint64_t seed) {
  if (name == "progress") return progress_suite(sig, cases, 2000, seed);
  if (name == "diamond") return diamond_suite(cases, seed);
  if (name == "canonical-forms") return canonical_forms_suite(sig, cases, seed);
  if (name == "erasure-soundness")
    return erasure_soundness_suite(sig, cases, seed);
  if (name == "subst-lemmas") return subst_lemma_suite(cases, seed);
  SuiteReport rep;
  rep.suite = name;
  rep.failed = 1;
  rep.counterexamples.push_back("unknown suite " + name);
  return rep;
}

// ---------------------------------------------------------------------------
// Shrinking
// ---------------------------------------------------------------------------

APtr shrink_welltyped(const Signature& sig, APtr term,
                      const std::function<bool(const APtr&)>& still_failing,
                      int attempts) {
  Checker ck(sig);
  APtr type;
  try {
    type = ck.infer(term).type;
  } catch (const TypeError&) {
    return term;
  }
  auto candidates_for = [&](const APtr& t) {
    std::vector<APtr> out;
    std::visit(overloaded{
                   [&](const ADCon& d) {
                     if (d.ctor == "S" && d.args.size() == 1)
                       out.push_back(d.args[0].term);  // peel one S
                   },
                   [&](const AApp& a) {
                     out.push_back(a.arg);
                     out.push_back(a.fun);
                   },
                   [&](const ACase& c) {
                     for (auto& br : c.branches)
                       if (br.binders.empty()) out.push_back(br.body);
                   },
                   [&](const AConv& c) { out.push_back(c.subject); },
                   [&](const auto&) {},
               },
               t->node);
    out.push_back(a_dcon("Z"));
    out.push_back(a_dcon("true"));
    out.push_back(a_abort(type));
    return out;
  };
  bool improved = true;
  while (improved && attempts > 0) {
    improved = false;
    for (auto& cand : candidates_for(term)) {
      if (--attempts < 0) break;
      if (node_count(cand) >= node_count(term)) continue;
      try {
        Checker ck2(sig);
        if (!type_eq(ck2.infer(cand).type, type)) continue;
      } catch (const TypeError&) {
        continue;
      }
      if (still_failing(cand)) {
        term = cand;
        improved = true;
        break;
      }
    }
  }
  return term;
}

}  // namespace trellys

#include "trellys/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace trellys {

namespace {

template <class N>
APtr mk(N n) {
  return std::make_shared<AExpr>(AExpr{std::move(n)});
}
template <class N>
UPtr mku(N n) {
  return std::make_shared<UExpr>(UExpr{std::move(n)});
}

}  // namespace

APtr a_star() { return mk(AStar{}); }
APtr a_var(Name n) { return mk(AVar{std::move(n)}); }
APtr a_rec(Name f, APtr type, APtr body) {
  return mk(ARec{std::move(f), std::move(type), std::move(body)});
}
APtr a_abort(APtr type) { return mk(AAbort{std::move(type)}); }
APtr a_pi(Name x, APtr dom, APtr cod, Relevance rel) {
  return mk(APi{std::move(x), std::move(dom), std::move(cod), rel});
}
APtr a_lam(Name x, APtr dom, APtr body, Relevance rel) {
  return mk(ALam{std::move(x), std::move(dom), std::move(body), rel});
}
APtr a_app(APtr fun, APtr arg, Relevance rel) {
  return mk(AApp{std::move(fun), std::move(arg), rel});
}
APtr a_tcon(Name d, std::vector<APtr> params) {
  return mk(ATCon{std::move(d), std::move(params)});
}
APtr a_dcon(Name d, std::vector<APtr> params, std::vector<AArg> args) {
  return mk(ADCon{std::move(d), std::move(params), std::move(args)});
}
APtr a_case(APtr scrut, Name eq_var, std::vector<ABranch> branches,
            APtr result) {
  return mk(ACase{std::move(scrut), std::move(eq_var), std::move(branches),
                  std::move(result)});
}
APtr a_eq(APtr l, APtr r) { return mk(AEq{std::move(l), std::move(r)}); }
APtr a_join(APtr l, APtr r, std::int64_t i, std::int64_t j) {
  return mk(AJoin{std::move(l), std::move(r), i, j});
}
APtr a_injdom(APtr p) { return mk(AInjDom{std::move(p)}); }
APtr a_injrng(APtr p, APtr witness) {
  return mk(AInjRng{std::move(p), std::move(witness)});
}
APtr a_injtcon(std::int64_t k, APtr p) {
  return mk(AInjTCon{k, std::move(p)});
}
APtr a_conv(APtr subject, std::vector<ConvProof> proofs, std::vector<Name> vars,
            APtr templ) {
  return mk(AConv{std::move(subject), std::move(proofs), std::move(vars),
                  std::move(templ)});
}

UPtr u_star() { return mku(UStar{}); }
UPtr u_var(Name n) { return mku(UVar{std::move(n)}); }
UPtr u_rec(Name f, UPtr body) { return mku(URec{std::move(f), std::move(body)}); }
UPtr u_abort() { return mku(UAbort{}); }
UPtr u_pi(Name x, UPtr dom, UPtr cod, Relevance rel) {
  return mku(UPi{std::move(x), std::move(dom), std::move(cod), rel});
}
UPtr u_lam(Name x, UPtr body) {
  return mku(ULam{std::move(x), std::move(body), Relevance::Relevant});
}
UPtr u_ilam(UPtr body) {
  return mku(ULam{Name{}, std::move(body), Relevance::Irrelevant});
}
UPtr u_app(UPtr fun, UPtr arg) {
  return mku(UApp{std::move(fun), std::move(arg), Relevance::Relevant});
}
UPtr u_iapp(UPtr fun) {
  return mku(UApp{std::move(fun), nullptr, Relevance::Irrelevant});
}
UPtr u_tcon(Name d, std::vector<UPtr> params) {
  return mku(UTCon{std::move(d), std::move(params)});
}
UPtr u_dcon(Name d, std::vector<UArg> args) {
  return mku(UDCon{std::move(d), std::move(args)});
}
UPtr u_case(UPtr scrut, std::vector<UBranch> branches) {
  return mku(UCase{std::move(scrut), std::move(branches)});
}
UPtr u_eq(UPtr l, UPtr r) { return mku(UEq{std::move(l), std::move(r)}); }
UPtr u_join() { return mku(UJoin{}); }

bool all_relevant(const Telescope& t) {
  return std::all_of(t.begin(), t.end(), [](const TeleEntry& e) {
    return e.rel == Relevance::Relevant;
  });
}

Name fresh_name(const Name& base, const std::set<Name>& avoid) {
  Name stem = base.empty() ? Name("x") : base;
  Name cand = stem + "'";
  if (!avoid.count(cand)) return cand;
  for (int k = 2;; ++k) {
    cand = stem + "'" + std::to_string(k);
    if (!avoid.count(cand)) return cand;
  }
}

// ---------------------------------------------------------------------------
// free_vars
// ---------------------------------------------------------------------------

namespace {

void fv(const APtr& e, std::set<Name>& bound, std::set<Name>& out);

void fv_under(const APtr& e, const Name& x, std::set<Name>& bound,
              std::set<Name>& out) {
  bool inserted = bound.insert(x).second;
  fv(e, bound, out);
  if (inserted) bound.erase(x);
}

void fv(const APtr& e, std::set<Name>& bound, std::set<Name>& out) {
  std::visit(
      overloaded{
          [&](const AStar&) {},
          [&](const AVar& v) {
            if (!bound.count(v.name)) out.insert(v.name);
          },
          [&](const ARec& r) {
            fv(r.type, bound, out);
            fv_under(r.body, r.f, bound, out);
          },
          [&](const AAbort& a) { fv(a.type, bound, out); },
          [&](const APi& p) {
            fv(p.domain, bound, out);
            fv_under(p.codomain, p.var, bound, out);
          },
          [&](const ALam& l) {
            fv(l.domain, bound, out);
            fv_under(l.body, l.var, bound, out);
          },
          [&](const AApp& a) {
            fv(a.fun, bound, out);
            fv(a.arg, bound, out);
          },
          [&](const ATCon& t) {
            for (auto& p : t.params) fv(p, bound, out);
          },
          [&](const ADCon& d) {
            for (auto& p : d.params) fv(p, bound, out);
            for (auto& a : d.args) fv(a.term, bound, out);
          },
          [&](const ACase& c) {
            fv(c.scrutinee, bound, out);
            if (c.result) fv(c.result, bound, out);
            for (auto& br : c.branches) {
              std::vector<Name> added;
              for (auto& b : br.binders)
                if (bound.insert(b.name).second) added.push_back(b.name);
              if (bound.insert(c.eq_var).second) added.push_back(c.eq_var);
              fv(br.body, bound, out);
              for (auto& n : added) bound.erase(n);
            }
          },
          [&](const AEq& q) {
            fv(q.lhs, bound, out);
            fv(q.rhs, bound, out);
          },
          [&](const AJoin& j) {
            fv(j.lhs, bound, out);
            fv(j.rhs, bound, out);
          },
          [&](const AInjDom& i) { fv(i.proof, bound, out); },
          [&](const AInjRng& i) {
            fv(i.proof, bound, out);
            fv(i.witness, bound, out);
          },
          [&](const AInjTCon& i) { fv(i.proof, bound, out); },
          [&](const AConv& c) {
            fv(c.subject, bound, out);
            for (auto& p : c.proofs) {
              if (p.is_value_proof()) {
                fv(p.value, bound, out);
              } else {
                fv(p.ann_lhs, bound, out);
                fv(p.ann_rhs, bound, out);
              }
            }
            std::vector<Name> added;
            for (auto& v : c.vars)
              if (bound.insert(v).second) added.push_back(v);
            fv(c.templ, bound, out);
            for (auto& n : added) bound.erase(n);
          },
      },
      e->node);
}

void ufv(const UPtr& e, std::set<Name>& bound, std::set<Name>& out) {
  std::visit(
      overloaded{
          [&](const UStar&) {},
          [&](const UVar& v) {
            if (!bound.count(v.name)) out.insert(v.name);
          },
          [&](const URec& r) {
            bool ins = bound.insert(r.f).second;
            ufv(r.body, bound, out);
            if (ins) bound.erase(r.f);
          },
          [&](const UAbort&) {},
          [&](const UPi& p) {
            ufv(p.domain, bound, out);
            bool ins = bound.insert(p.var).second;
            ufv(p.codomain, bound, out);
            if (ins) bound.erase(p.var);
          },
          [&](const ULam& l) {
            if (l.rel == Relevance::Relevant) {
              bool ins = bound.insert(l.var).second;
              ufv(l.body, bound, out);
              if (ins) bound.erase(l.var);
            } else {
              ufv(l.body, bound, out);
            }
          },
          [&](const UApp& a) {
            ufv(a.fun, bound, out);
            if (a.arg) ufv(a.arg, bound, out);
          },
          [&](const UTCon& t) {
            for (auto& p : t.params) ufv(p, bound, out);
          },
          [&](const UDCon& d) {
            for (auto& a : d.args)
              if (!a.placeholder()) ufv(a.term, bound, out);
          },
          [&](const UCase& c) {
            ufv(c.scrutinee, bound, out);
            for (auto& br : c.branches) {
              std::vector<Name> added;
              for (auto& v : br.vars)
                if (bound.insert(v).second) added.push_back(v);
              ufv(br.body, bound, out);
              for (auto& n : added) bound.erase(n);
            }
          },
          [&](const UEq& q) {
            ufv(q.lhs, bound, out);
            ufv(q.rhs, bound, out);
          },
          [&](const UJoin&) {},
      },
      e->node);
}

}  // namespace

std::set<Name> free_vars(const APtr& e) {
  std::set<Name> bound, out;
  fv(e, bound, out);
  return out;
}

std::set<Name> free_vars(const UPtr& e) {
  std::set<Name> bound, out;
  ufv(e, bound, out);
  return out;
}

// ---------------------------------------------------------------------------
// substitution
// ---------------------------------------------------------------------------

namespace {

// Shared binder discipline for both languages: drop shadowed mappings, rename
// the binder when it would capture a free variable of a replacement.
template <class Ptr, class Sub, class FreeVars>
struct BinderHelper {
  // Restrict sub to mappings not shadowed by the binders, and compute the
  // renaming needed for binders that appear free in some replacement.
  static void open(const std::vector<Name>& binders, const Sub& sub,
                   const std::set<Name>& body_fv, Sub& inner,
                   std::map<Name, Name>& renames) {
    std::set<Name> repl_fv;
    for (auto& [k, v] : sub) {
      if (std::find(binders.begin(), binders.end(), k) != binders.end())
        continue;
      if (!body_fv.count(k)) continue;  // replacement never used
      inner[k] = v;
      auto fvs = FreeVars{}(v);
      repl_fv.insert(fvs.begin(), fvs.end());
    }
    if (inner.empty()) return;
    std::set<Name> avoid = repl_fv;
    avoid.insert(body_fv.begin(), body_fv.end());
    for (auto& [k, v] : inner) avoid.insert(k);
    for (auto& b : binders) avoid.insert(b);
    for (auto& b : binders) {
      if (repl_fv.count(b)) {
        Name nb = fresh_name(b, avoid);
        avoid.insert(nb);
        renames[b] = nb;
      }
    }
  }
};

struct AFreeVars {
  std::set<Name> operator()(const APtr& e) const { return free_vars(e); }
};
struct UFreeVars {
  std::set<Name> operator()(const UPtr& e) const { return free_vars(e); }
};

APtr asub(const APtr& e, const ASubst& sub);

// Substitute under a binder group; binders are renamed if needed and the body
// is rebuilt. rebuilt(i) gives the possibly renamed i-th binder.
struct AOpened {
  std::vector<Name> binders;
  ASubst inner;
  bool identity;
};

AOpened a_open(const std::vector<Name>& binders, const ASubst& sub,
               const APtr& body) {
  AOpened o;
  o.binders = binders;
  auto body_fv = free_vars(body);
  std::map<Name, Name> renames;
  BinderHelper<APtr, ASubst, AFreeVars>::open(binders, sub, body_fv, o.inner,
                                              renames);
  o.identity = o.inner.empty();
  for (auto& [from, to] : renames) {
    o.inner[from] = a_var(to);
    o.identity = false;
  }
  for (auto& b : o.binders) {
    auto it = renames.find(b);
    if (it != renames.end()) b = it->second;
  }
  return o;
}

APtr asub(const APtr& e, const ASubst& sub) {
  if (sub.empty()) return e;
  return std::visit(
      overloaded{
          [&](const AStar&) { return e; },
          [&](const AVar& v) {
            auto it = sub.find(v.name);
            return it != sub.end() ? it->second : e;
          },
          [&](const ARec& r) {
            APtr type = asub(r.type, sub);
            auto o = a_open({r.f}, sub, r.body);
            APtr body = o.identity ? r.body : asub(r.body, o.inner);
            if (type == r.type && body == r.body) return e;
            return a_rec(o.binders[0], type, body);
          },
          [&](const AAbort& a) {
            APtr t = asub(a.type, sub);
            return t == a.type ? e : a_abort(t);
          },
          [&](const APi& p) {
            APtr dom = asub(p.domain, sub);
            auto o = a_open({p.var}, sub, p.codomain);
            APtr cod = o.identity ? p.codomain : asub(p.codomain, o.inner);
            if (dom == p.domain && cod == p.codomain) return e;
            return a_pi(o.binders[0], dom, cod, p.rel);
          },
          [&](const ALam& l) {
            APtr dom = asub(l.domain, sub);
            auto o = a_open({l.var}, sub, l.body);
            APtr body = o.identity ? l.body : asub(l.body, o.inner);
            if (dom == l.domain && body == l.body) return e;
            return a_lam(o.binders[0], dom, body, l.rel);
          },
          [&](const AApp& a) {
            return a_app(asub(a.fun, sub), asub(a.arg, sub), a.rel);
          },
          [&](const ATCon& t) {
            std::vector<APtr> ps;
            ps.reserve(t.params.size());
            for (auto& p : t.params) ps.push_back(asub(p, sub));
            return a_tcon(t.dtype, std::move(ps));
          },
          [&](const ADCon& d) {
            std::vector<APtr> ps;
            for (auto& p : d.params) ps.push_back(asub(p, sub));
            std::vector<AArg> as;
            for (auto& a : d.args) as.push_back({asub(a.term, sub), a.rel});
            return a_dcon(d.ctor, std::move(ps), std::move(as));
          },
          [&](const ACase& c) {
            APtr scrut = asub(c.scrutinee, sub);
            APtr result = c.result ? asub(c.result, sub) : nullptr;
            // eq_var must keep a single name across branches, so rename it up
            // front when some replacement mentions it.
            Name new_eq = c.eq_var;
            std::set<Name> repl_fv;
            for (auto& [k, v] : sub) {
              auto fvs = free_vars(v);
              repl_fv.insert(fvs.begin(), fvs.end());
            }
            bool rename_eq = repl_fv.count(c.eq_var) > 0;
            if (rename_eq) {
              std::set<Name> avoid = repl_fv;
              for (auto& br : c.branches) {
                auto bfv = free_vars(br.body);
                avoid.insert(bfv.begin(), bfv.end());
                for (auto& b : br.binders) avoid.insert(b.name);
              }
              for (auto& [k, v] : sub) avoid.insert(k);
              new_eq = fresh_name(c.eq_var, avoid);
            }
            std::vector<ABranch> brs;
            for (auto& br : c.branches) {
              APtr body0 = br.body;
              if (rename_eq) {
                bool shadowed = false;
                for (auto& b : br.binders)
                  if (b.name == c.eq_var) shadowed = true;
                if (!shadowed) {
                  ASubst pre;
                  pre[c.eq_var] = a_var(new_eq);
                  body0 = asub(br.body, pre);
                }
              }
              std::vector<Name> binders;
              for (auto& b : br.binders) binders.push_back(b.name);
              binders.push_back(new_eq);
              auto o = a_open(binders, sub, body0);
              APtr body = o.identity ? body0 : asub(body0, o.inner);
              std::vector<APatVar> pvs;
              for (size_t i = 0; i < br.binders.size(); ++i)
                pvs.push_back({o.binders[i], br.binders[i].rel});
              brs.push_back({br.ctor, std::move(pvs), body});
            }
            return a_case(scrut, new_eq, std::move(brs), result);
          },
          [&](const AEq& q) { return a_eq(asub(q.lhs, sub), asub(q.rhs, sub)); },
          [&](const AJoin& j) {
            return a_join(asub(j.lhs, sub), asub(j.rhs, sub), j.steps_lhs,
                          j.steps_rhs);
          },
          [&](const AInjDom& i) { return a_injdom(asub(i.proof, sub)); },
          [&](const AInjRng& i) {
            return a_injrng(asub(i.proof, sub), asub(i.witness, sub));
          },
          [&](const AInjTCon& i) {
            return a_injtcon(i.index, asub(i.proof, sub));
          },
          [&](const AConv& c) {
            APtr subject = asub(c.subject, sub);
            std::vector<ConvProof> proofs;
            for (auto& p : c.proofs) {
              if (p.is_value_proof())
                proofs.push_back({asub(p.value, sub), nullptr, nullptr});
              else
                proofs.push_back(
                    {nullptr, asub(p.ann_lhs, sub), asub(p.ann_rhs, sub)});
            }
            auto o = a_open(c.vars, sub, c.templ);
            APtr templ = o.identity ? c.templ : asub(c.templ, o.inner);
            return a_conv(subject, std::move(proofs), o.binders, templ);
          },
      },
      e->node);
}

UPtr usub(const UPtr& e, const USubst& sub);

struct UOpened {
  std::vector<Name> binders;
  USubst inner;
  bool identity;
};

UOpened u_open(const std::vector<Name>& binders, const USubst& sub,
               const UPtr& body) {
  UOpened o;
  o.binders = binders;
  auto body_fv = free_vars(body);
  std::map<Name, Name> renames;
  BinderHelper<UPtr, USubst, UFreeVars>::open(binders, sub, body_fv, o.inner,
                                              renames);
  o.identity = o.inner.empty();
  for (auto& [from, to] : renames) {
    o.inner[from] = u_var(to);
    o.identity = false;
  }
  for (auto& b : o.binders) {
    auto it = renames.find(b);
    if (it != renames.end()) b = it->second;
  }
  return o;
}

UPtr usub(const UPtr& e, const USubst& sub) {
  if (sub.empty()) return e;
  return std::visit(
      overloaded{
          [&](const UStar&) { return e; },
          [&](const UVar& v) {
            auto it = sub.find(v.name);
            return it != sub.end() ? it->second : e;
          },
          [&](const URec& r) {
            auto o = u_open({r.f}, sub, r.body);
            UPtr body = o.identity ? r.body : usub(r.body, o.inner);
            if (body == r.body) return e;
            return u_rec(o.binders[0], body);
          },
          [&](const UAbort&) { return e; },
          [&](const UPi& p) {
            UPtr dom = usub(p.domain, sub);
            auto o = u_open({p.var}, sub, p.codomain);
            UPtr cod = o.identity ? p.codomain : usub(p.codomain, o.inner);
            if (dom == p.domain && cod == p.codomain) return e;
            return u_pi(o.binders[0], dom, cod, p.rel);
          },
          [&](const ULam& l) {
            if (l.rel == Relevance::Irrelevant)
              return u_ilam(usub(l.body, sub));
            auto o = u_open({l.var}, sub, l.body);
            UPtr body = o.identity ? l.body : usub(l.body, o.inner);
            if (body == l.body) return e;
            return u_lam(o.binders[0], body);
          },
          [&](const UApp& a) {
            if (a.rel == Relevance::Irrelevant)
              return u_iapp(usub(a.fun, sub));
            return u_app(usub(a.fun, sub), usub(a.arg, sub));
          },
          [&](const UTCon& t) {
            std::vector<UPtr> ps;
            for (auto& p : t.params) ps.push_back(usub(p, sub));
            return u_tcon(t.dtype, std::move(ps));
          },
          [&](const UDCon& d) {
            std::vector<UArg> as;
            for (auto& a : d.args)
              as.push_back({a.placeholder() ? nullptr : usub(a.term, sub)});
            return u_dcon(d.ctor, std::move(as));
          },
          [&](const UCase& c) {
            UPtr scrut = usub(c.scrutinee, sub);
            std::vector<UBranch> brs;
            for (auto& br : c.branches) {
              auto o = u_open(br.vars, sub, br.body);
              UPtr body = o.identity ? br.body : usub(br.body, o.inner);
              brs.push_back({br.ctor, o.binders, body});
            }
            return u_case(scrut, std::move(brs));
          },
          [&](const UEq& q) { return u_eq(usub(q.lhs, sub), usub(q.rhs, sub)); },
          [&](const UJoin&) { return e; },
      },
      e->node);
}

}  // namespace

APtr subst(const APtr& e, const ASubst& sub) { return asub(e, sub); }
APtr subst(const APtr& e, const Name& x, const APtr& v) {
  ASubst s;
  s[x] = v;
  return asub(e, s);
}
UPtr subst(const UPtr& e, const USubst& sub) { return usub(e, sub); }
UPtr subst(const UPtr& e, const Name& x, const UPtr& v) {
  USubst s;
  s[x] = v;
  return usub(e, s);
}

// ---------------------------------------------------------------------------
// alpha equivalence
// ---------------------------------------------------------------------------

namespace {

// Binder environments as parallel stacks; a bound variable is identified by
// its de Bruijn level.
struct AlphaEnv {
  std::vector<Name> left, right;
  std::optional<size_t> level_left(const Name& n) const {
    for (size_t i = left.size(); i-- > 0;)
      if (left[i] == n) return i;
    return std::nullopt;
  }
  std::optional<size_t> level_right(const Name& n) const {
    for (size_t i = right.size(); i-- > 0;)
      if (right[i] == n) return i;
    return std::nullopt;
  }
};

bool aeq(const APtr& a, const APtr& b, AlphaEnv& env);

bool aeq_under(const APtr& a, const APtr& b, const Name& x, const Name& y,
               AlphaEnv& env) {
  env.left.push_back(x);
  env.right.push_back(y);
  bool r = aeq(a, b, env);
  env.left.pop_back();
  env.right.pop_back();
  return r;
}

bool var_eq(const Name& x, const Name& y, const AlphaEnv& env) {
  auto lx = env.level_left(x);
  auto ly = env.level_right(y);
  if (lx.has_value() != ly.has_value()) return false;
  if (lx) return *lx == *ly;
  return x == y;
}

bool aeq(const APtr& a, const APtr& b, AlphaEnv& env) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const AStar&) { return true; },
          [&](const AVar& v) {
            return var_eq(v.name, std::get<AVar>(b->node).name, env);
          },
          [&](const ARec& r) {
            auto& r2 = std::get<ARec>(b->node);
            return aeq(r.type, r2.type, env) &&
                   aeq_under(r.body, r2.body, r.f, r2.f, env);
          },
          [&](const AAbort& x) {
            return aeq(x.type, std::get<AAbort>(b->node).type, env);
          },
          [&](const APi& p) {
            auto& p2 = std::get<APi>(b->node);
            return p.rel == p2.rel && aeq(p.domain, p2.domain, env) &&
                   aeq_under(p.codomain, p2.codomain, p.var, p2.var, env);
          },
          [&](const ALam& l) {
            auto& l2 = std::get<ALam>(b->node);
            return l.rel == l2.rel && aeq(l.domain, l2.domain, env) &&
                   aeq_under(l.body, l2.body, l.var, l2.var, env);
          },
          [&](const AApp& x) {
            auto& x2 = std::get<AApp>(b->node);
            return x.rel == x2.rel && aeq(x.fun, x2.fun, env) &&
                   aeq(x.arg, x2.arg, env);
          },
          [&](const ATCon& t) {
            auto& t2 = std::get<ATCon>(b->node);
            if (t.dtype != t2.dtype || t.params.size() != t2.params.size())
              return false;
            for (size_t i = 0; i < t.params.size(); ++i)
              if (!aeq(t.params[i], t2.params[i], env)) return false;
            return true;
          },
          [&](const ADCon& d) {
            auto& d2 = std::get<ADCon>(b->node);
            if (d.ctor != d2.ctor || d.params.size() != d2.params.size() ||
                d.args.size() != d2.args.size())
              return false;
            for (size_t i = 0; i < d.params.size(); ++i)
              if (!aeq(d.params[i], d2.params[i], env)) return false;
            for (size_t i = 0; i < d.args.size(); ++i) {
              if (d.args[i].rel != d2.args[i].rel) return false;
              if (!aeq(d.args[i].term, d2.args[i].term, env)) return false;
            }
            return true;
          },
          [&](const ACase& c) {
            auto& c2 = std::get<ACase>(b->node);
            if (c.branches.size() != c2.branches.size()) return false;
            if (!aeq(c.scrutinee, c2.scrutinee, env)) return false;
            if ((c.result == nullptr) != (c2.result == nullptr)) return false;
            if (c.result && !aeq(c.result, c2.result, env)) return false;
            for (size_t i = 0; i < c.branches.size(); ++i) {
              auto& br = c.branches[i];
              auto& br2 = c2.branches[i];
              if (br.ctor != br2.ctor ||
                  br.binders.size() != br2.binders.size())
                return false;
              for (size_t j = 0; j < br.binders.size(); ++j)
                if (br.binders[j].rel != br2.binders[j].rel) return false;
              size_t pushed = 0;
              for (size_t j = 0; j < br.binders.size(); ++j) {
                env.left.push_back(br.binders[j].name);
                env.right.push_back(br2.binders[j].name);
                ++pushed;
              }
              env.left.push_back(c.eq_var);
              env.right.push_back(c2.eq_var);
              ++pushed;
              bool ok = aeq(br.body, br2.body, env);
              for (size_t j = 0; j < pushed; ++j) {
                env.left.pop_back();
                env.right.pop_back();
              }
              if (!ok) return false;
            }
            return true;
          },
          [&](const AEq& q) {
            auto& q2 = std::get<AEq>(b->node);
            return aeq(q.lhs, q2.lhs, env) && aeq(q.rhs, q2.rhs, env);
          },
          [&](const AJoin& j) {
            auto& j2 = std::get<AJoin>(b->node);
            return j.steps_lhs == j2.steps_lhs &&
                   j.steps_rhs == j2.steps_rhs && aeq(j.lhs, j2.lhs, env) &&
                   aeq(j.rhs, j2.rhs, env);
          },
          [&](const AInjDom& i) {
            return aeq(i.proof, std::get<AInjDom>(b->node).proof, env);
          },
          [&](const AInjRng& i) {
            auto& i2 = std::get<AInjRng>(b->node);
            return aeq(i.proof, i2.proof, env) &&
                   aeq(i.witness, i2.witness, env);
          },
          [&](const AInjTCon& i) {
            auto& i2 = std::get<AInjTCon>(b->node);
            return i.index == i2.index && aeq(i.proof, i2.proof, env);
          },
          [&](const AConv& c) {
            auto& c2 = std::get<AConv>(b->node);
            if (c.proofs.size() != c2.proofs.size() ||
                c.vars.size() != c2.vars.size())
              return false;
            if (!aeq(c.subject, c2.subject, env)) return false;
            for (size_t i = 0; i < c.proofs.size(); ++i) {
              auto& p = c.proofs[i];
              auto& p2 = c2.proofs[i];
              if (p.is_value_proof() != p2.is_value_proof()) return false;
              if (p.is_value_proof()) {
                if (!aeq(p.value, p2.value, env)) return false;
              } else {
                if (!aeq(p.ann_lhs, p2.ann_lhs, env) ||
                    !aeq(p.ann_rhs, p2.ann_rhs, env))
                  return false;
              }
            }
            size_t pushed = 0;
            for (size_t i = 0; i < c.vars.size(); ++i) {
              env.left.push_back(c.vars[i]);
              env.right.push_back(c2.vars[i]);
              ++pushed;
            }
            bool ok = aeq(c.templ, c2.templ, env);
            for (size_t i = 0; i < pushed; ++i) {
              env.left.pop_back();
              env.right.pop_back();
            }
            return ok;
          },
      },
      a->node);
}

bool ueq(const UPtr& a, const UPtr& b, AlphaEnv& env) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const UStar&) { return true; },
          [&](const UVar& v) {
            return var_eq(v.name, std::get<UVar>(b->node).name, env);
          },
          [&](const URec& r) {
            auto& r2 = std::get<URec>(b->node);
            env.left.push_back(r.f);
            env.right.push_back(r2.f);
            bool ok = ueq(r.body, r2.body, env);
            env.left.pop_back();
            env.right.pop_back();
            return ok;
          },
          [&](const UAbort&) { return true; },
          [&](const UPi& p) {
            auto& p2 = std::get<UPi>(b->node);
            if (p.rel != p2.rel || !ueq(p.domain, p2.domain, env)) return false;
            env.left.push_back(p.var);
            env.right.push_back(p2.var);
            bool ok = ueq(p.codomain, p2.codomain, env);
            env.left.pop_back();
            env.right.pop_back();
            return ok;
          },
          [&](const ULam& l) {
            auto& l2 = std::get<ULam>(b->node);
            if (l.rel != l2.rel) return false;
            if (l.rel == Relevance::Irrelevant)
              return ueq(l.body, l2.body, env);
            env.left.push_back(l.var);
            env.right.push_back(l2.var);
            bool ok = ueq(l.body, l2.body, env);
            env.left.pop_back();
            env.right.pop_back();
            return ok;
          },
          [&](const UApp& x) {
            auto& x2 = std::get<UApp>(b->node);
            if (x.rel != x2.rel || !ueq(x.fun, x2.fun, env)) return false;
            if (x.rel == Relevance::Irrelevant) return true;
            return ueq(x.arg, x2.arg, env);
          },
          [&](const UTCon& t) {
            auto& t2 = std::get<UTCon>(b->node);
            if (t.dtype != t2.dtype || t.params.size() != t2.params.size())
              return false;
            for (size_t i = 0; i < t.params.size(); ++i)
              if (!ueq(t.params[i], t2.params[i], env)) return false;
            return true;
          },
          [&](const UDCon& d) {
            auto& d2 = std::get<UDCon>(b->node);
            if (d.ctor != d2.ctor || d.args.size() != d2.args.size())
              return false;
            for (size_t i = 0; i < d.args.size(); ++i) {
              if (d.args[i].placeholder() != d2.args[i].placeholder())
                return false;
              if (!d.args[i].placeholder() &&
                  !ueq(d.args[i].term, d2.args[i].term, env))
                return false;
            }
            return true;
          },
          [&](const UCase& c) {
            auto& c2 = std::get<UCase>(b->node);
            if (c.branches.size() != c2.branches.size()) return false;
            if (!ueq(c.scrutinee, c2.scrutinee, env)) return false;
            for (size_t i = 0; i < c.branches.size(); ++i) {
              auto& br = c.branches[i];
              auto& br2 = c2.branches[i];
              if (br.ctor != br2.ctor || br.vars.size() != br2.vars.size())
                return false;
              for (size_t j = 0; j < br.vars.size(); ++j) {
                env.left.push_back(br.vars[j]);
                env.right.push_back(br2.vars[j]);
              }
              bool ok = ueq(br.body, br2.body, env);
              for (size_t j = 0; j < br.vars.size(); ++j) {
                env.left.pop_back();
                env.right.pop_back();
              }
              if (!ok) return false;
            }
            return true;
          },
          [&](const UEq& q) {
            auto& q2 = std::get<UEq>(b->node);
            return ueq(q.lhs, q2.lhs, env) && ueq(q.rhs, q2.rhs, env);
          },
          [&](const UJoin&) { return true; },
      },
      a->node);
}

}  // namespace

bool alpha_eq(const APtr& a, const APtr& b) {
  AlphaEnv env;
  return aeq(a, b, env);
}

bool alpha_eq(const UPtr& a, const UPtr& b) {
  AlphaEnv env;
  return ueq(a, b, env);
}

// ---------------------------------------------------------------------------
// values
// ---------------------------------------------------------------------------

bool is_value(const APtr& e) {
  return std::visit(
      overloaded{
          [&](const AStar&) { return true; },
          [&](const AVar&) { return true; },
          [&](const ARec& r) { return is_value(r.body); },
          [&](const AAbort&) { return false; },
          [&](const APi&) { return true; },
          [&](const ALam&) { return true; },
          [&](const AApp&) { return false; },
          [&](const ATCon&) { return true; },
          [&](const ADCon& d) {
            for (auto& a : d.args)
              if (a.rel == Relevance::Relevant && !is_value(a.term))
                return false;
            return true;
          },
          [&](const ACase&) { return false; },
          [&](const AEq&) { return true; },
          [&](const AJoin&) { return true; },
          [&](const AInjDom&) { return true; },
          [&](const AInjRng&) { return true; },
          [&](const AInjTCon&) { return true; },
          [&](const AConv& c) { return is_value(c.subject); },
      },
      e->node);
}

bool is_value(const UPtr& e) {
  return std::visit(
      overloaded{
          [&](const UStar&) { return true; },
          [&](const UVar&) { return true; },
          [&](const URec& r) { return is_value(r.body); },
          [&](const UAbort&) { return false; },
          [&](const UPi&) { return true; },
          [&](const ULam&) { return true; },
          [&](const UApp&) { return false; },
          [&](const UTCon&) { return true; },
          [&](const UDCon& d) {
            for (auto& a : d.args)
              if (!a.placeholder() && !is_value(a.term)) return false;
            return true;
          },
          [&](const UCase&) { return false; },
          [&](const UEq&) { return true; },
          [&](const UJoin&) { return true; },
      },
      e->node);
}

std::optional<std::string> head_constructor(const UPtr& e) {
  return std::visit(
      overloaded{
          [&](const UStar&) -> std::optional<std::string> { return "*"; },
          [&](const UPi& p) -> std::optional<std::string> {
            return p.rel == Relevance::Relevant ? "->" : "[]->";
          },
          [&](const UTCon& t) -> std::optional<std::string> { return t.dtype; },
          [&](const UDCon& d) -> std::optional<std::string> { return d.ctor; },
          [&](const UEq&) -> std::optional<std::string> { return "="; },
          [&](const auto&) -> std::optional<std::string> {
            return std::nullopt;
          },
      },
      e->node);
}

// ---------------------------------------------------------------------------
// canonical key and node counts
// ---------------------------------------------------------------------------

namespace {

void ukey_rec(const UPtr& e, std::vector<Name>& bound, std::string& out) {
  auto push = [&](const Name& n) { bound.push_back(n); };
  auto pop = [&](size_t k) { bound.resize(bound.size() - k); };
  auto var = [&](const Name& n) {
    for (size_t i = bound.size(); i-- > 0;)
      if (bound[i] == n) {
        out += "#";
        out += std::to_string(bound.size() - i);
        return;
      }
    out += n;
  };
  std::visit(
      overloaded{
          [&](const UStar&) { out += "*"; },
          [&](const UVar& v) { var(v.name); },
          [&](const URec& r) {
            out += "(rec ";
            push(r.f);
            ukey_rec(r.body, bound, out);
            pop(1);
            out += ")";
          },
          [&](const UAbort&) { out += "abort"; },
          [&](const UPi& p) {
            out += p.rel == Relevance::Relevant ? "(pi " : "(ipi ";
            ukey_rec(p.domain, bound, out);
            out += " ";
            push(p.var);
            ukey_rec(p.codomain, bound, out);
            pop(1);
            out += ")";
          },
          [&](const ULam& l) {
            if (l.rel == Relevance::Relevant) {
              out += "(lam ";
              push(l.var);
              ukey_rec(l.body, bound, out);
              pop(1);
            } else {
              out += "(ilam ";
              ukey_rec(l.body, bound, out);
            }
            out += ")";
          },
          [&](const UApp& a) {
            out += a.rel == Relevance::Relevant ? "(app " : "(iapp ";
            ukey_rec(a.fun, bound, out);
            if (a.arg) {
              out += " ";
              ukey_rec(a.arg, bound, out);
            }
            out += ")";
          },
          [&](const UTCon& t) {
            out += "(tcon " + t.dtype;
            for (auto& p : t.params) {
              out += " ";
              ukey_rec(p, bound, out);
            }
            out += ")";
          },
          [&](const UDCon& d) {
            out += "(dcon " + d.ctor;
            for (auto& a : d.args) {
              out += " ";
              if (a.placeholder())
                out += "[]";
              else
                ukey_rec(a.term, bound, out);
            }
            out += ")";
          },
          [&](const UCase& c) {
            out += "(case ";
            ukey_rec(c.scrutinee, bound, out);
            for (auto& br : c.branches) {
              out += " (" + br.ctor + " ";
              for (auto& v : br.vars) push(v);
              ukey_rec(br.body, bound, out);
              pop(br.vars.size());
              out += ")";
            }
            out += ")";
          },
          [&](const UEq& q) {
            out += "(eq ";
            ukey_rec(q.lhs, bound, out);
            out += " ";
            ukey_rec(q.rhs, bound, out);
            out += ")";
          },
          [&](const UJoin&) { out += "join"; },
      },
      e->node);
}

}  // namespace

std::string ukey(const UPtr& e) {
  std::string out;
  std::vector<Name> bound;
  ukey_rec(e, bound, out);
  return out;
}

int node_count(const UPtr& e) {
  int n = 1;
  std::visit(
      overloaded{
          [&](const UStar&) {},
          [&](const UVar&) {},
          [&](const URec& r) { n += node_count(r.body); },
          [&](const UAbort&) {},
          [&](const UPi& p) {
            n += node_count(p.domain) + node_count(p.codomain);
          },
          [&](const ULam& l) { n += node_count(l.body); },
          [&](const UApp& a) {
            n += node_count(a.fun);
            if (a.arg) n += node_count(a.arg);
          },
          [&](const UTCon& t) {
            for (auto& p : t.params) n += node_count(p);
          },
          [&](const UDCon& d) {
            for (auto& a : d.args)
              if (!a.placeholder()) n += node_count(a.term);
          },
          [&](const UCase& c) {
            n += node_count(c.scrutinee);
            for (auto& br : c.branches) n += node_count(br.body);
          },
          [&](const UEq& q) { n += node_count(q.lhs) + node_count(q.rhs); },
          [&](const UJoin&) {},
      },
      e->node);
  return n;
}

int node_count(const APtr& e) {
  int n = 1;
  std::visit(
      overloaded{
          [&](const AStar&) {},
          [&](const AVar&) {},
          [&](const ARec& r) { n += node_count(r.type) + node_count(r.body); },
          [&](const AAbort& a) { n += node_count(a.type); },
          [&](const APi& p) {
            n += node_count(p.domain) + node_count(p.codomain);
          },
          [&](const ALam& l) { n += node_count(l.domain) + node_count(l.body); },
          [&](const AApp& a) { n += node_count(a.fun) + node_count(a.arg); },
          [&](const ATCon& t) {
            for (auto& p : t.params) n += node_count(p);
          },
          [&](const ADCon& d) {
            for (auto& p : d.params) n += node_count(p);
            for (auto& a : d.args) n += node_count(a.term);
          },
          [&](const ACase& c) {
            n += node_count(c.scrutinee);
            if (c.result) n += node_count(c.result);
            for (auto& br : c.branches) n += node_count(br.body);
          },
          [&](const AEq& q) { n += node_count(q.lhs) + node_count(q.rhs); },
          [&](const AJoin& j) { n += node_count(j.lhs) + node_count(j.rhs); },
          [&](const AInjDom& i) { n += node_count(i.proof); },
          [&](const AInjRng& i) {
            n += node_count(i.proof) + node_count(i.witness);
          },
          [&](const AInjTCon& i) { n += node_count(i.proof); },
          [&](const AConv& c) {
            n += node_count(c.subject) + node_count(c.templ);
            for (auto& p : c.proofs) {
              if (p.is_value_proof())
                n += node_count(p.value);
              else
                n += node_count(p.ann_lhs) + node_count(p.ann_rhs);
            }
          },
      },
      e->node);
  return n;
}

}  // namespace trellys

#include "trellys/typecheck.hpp"

#include <algorithm>

#include "trellys/eval.hpp"

namespace trellys {

namespace {

// Deep enough for any reasonable program (numerals print up to 1000);
// conservative enough that the recursion never outruns the machine stack.
constexpr int kMaxDepth = 2'000;

std::string show(const APtr& e) { return pretty(e); }

}  // namespace

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

const DataDecl* Signature::datatype(const Name& n) const {
  for (auto& d : datatypes_)
    if (d.name == n) return &d;
  return nullptr;
}

std::optional<Signature::CtorRef> Signature::ctor(const Name& n) const {
  for (auto& d : datatypes_)
    for (auto& c : d.ctors)
      if (c.name == n) return CtorRef{&d, &c};
  return std::nullopt;
}

const Def* Signature::def(const Name& n) const {
  for (auto& d : defs_)
    if (d.name == n) return &d;
  return nullptr;
}

void Signature::add_datatype(DataDecl d) { datatypes_.push_back(std::move(d)); }
void Signature::add_def(Def d) { defs_.push_back(std::move(d)); }

bool Signature::known(const Name& n) const {
  return datatype(n) != nullptr || ctor(n).has_value() || def(n) != nullptr;
}

bool type_eq(const APtr& a, const APtr& b) {
  return alpha_eq(erase(a), erase(b));
}

// ---------------------------------------------------------------------------
// Checker
// ---------------------------------------------------------------------------

Checker::Checker(const Signature& sig) : sig_(sig) {
  for (auto& d : sig.defs()) {
    if (!d.is_value) continue;
    UPtr body = erase(d.body);
    if (!unfolds_.empty()) {
      USubst sub;
      for (auto& [n, u] : unfolds_) sub[n] = u;
      body = subst(body, sub);
    }
    ctx_.emplace_back(d.name, d.type);
    unfolds_.emplace_back(d.name, body);
  }
}

UPtr Checker::unfold(const UPtr& m) const {
  if (unfolds_.empty()) return m;
  USubst sub;
  for (auto& [n, u] : unfolds_) sub[n] = u;
  return subst(m, sub);
}

DerivPtr Checker::node(std::string rule, APtr subject, APtr type,
                       std::vector<DerivPtr> children,
                       std::vector<Name> conv_vars, APtr conv_template) const {
  auto d = std::make_shared<Derivation>();
  d->rule = std::move(rule);
  d->ctx = ctx_;
  d->subject = std::move(subject);
  d->type = std::move(type);
  d->children = std::move(children);
  d->conv_vars = std::move(conv_vars);
  d->conv_template = std::move(conv_template);
  return d;
}

std::optional<APtr> Checker::lookup(const Name& n) const {
  for (size_t i = ctx_.size(); i-- > 0;)
    if (ctx_[i].first == n) return ctx_[i].second;
  return std::nullopt;
}

InferResult Checker::infer(const APtr& a) { return infer_rec(a); }

InferResult Checker::infer_in(const AContext& extra, const APtr& a) {
  size_t base = ctx_.size();
  for (auto& b : extra) ctx_.push_back(b);
  try {
    auto r = infer_rec(a);
    ctx_.resize(base);
    return r;
  } catch (...) {
    ctx_.resize(base);
    throw;
  }
}

DerivPtr Checker::check_type(const APtr& t) { return kind_check(t); }

DerivPtr Checker::kind_check(const APtr& t) {
  auto r = infer_rec(t);
  if (!type_eq(r.type, a_star()))
    throw TypeError("t_kind", show(t) + " is not a type (it has type " +
                                 show(r.type) + ")");
  return r.deriv;
}

struct DepthGuard {
  int& d;
  explicit DepthGuard(int& depth) : d(depth) {
    if (++d > kMaxDepth)
      throw TypeError("t_depth", "checker recursion limit exceeded");
  }
  ~DepthGuard() { --d; }
};

InferResult Checker::infer_rec(const APtr& a) {
  DepthGuard guard(depth_);
  return std::visit(
      overloaded{
          [&](const AStar&) -> InferResult {
            return {a_star(), node("t_type", a, a_star(), {})};
          },
          [&](const AVar& v) -> InferResult {
            auto t = lookup(v.name);
            if (!t) {
              if (auto* d = sig_.def(v.name); d && !d->is_value)
                throw TypeError("t_var",
                                "definition '" + v.name +
                                    "' is not a syntactic value and cannot be "
                                    "referenced by later terms");
              throw TypeError("t_var", "unbound variable " + v.name);
            }
            return {*t, node("t_var", a, *t, {})};
          },
          [&](const APi& p) -> InferResult {
            DerivPtr dom = kind_check(p.domain);
            ctx_.emplace_back(p.var, p.domain);
            DerivPtr cod;
            try {
              cod = kind_check(p.codomain);
            } catch (...) {
              ctx_.pop_back();
              throw;
            }
            ctx_.pop_back();
            const char* rule =
                p.rel == Relevance::Relevant ? "t_pi" : "t_ipi";
            return {a_star(), node(rule, a, a_star(), {dom, cod})};
          },
          [&](const ALam& l) -> InferResult {
            DerivPtr dom = kind_check(l.domain);
            ctx_.emplace_back(l.var, l.domain);
            InferResult body;
            try {
              body = infer_rec(l.body);
            } catch (...) {
              ctx_.pop_back();
              throw;
            }
            ctx_.pop_back();
            if (l.rel == Relevance::Irrelevant) {
              auto fv = free_vars(erase(l.body));
              if (fv.count(l.var))
                throw TypeError(
                    "t_iabs", "irrelevant binder " + l.var +
                                  " occurs in the erasure of the body " +
                                  pretty(erase(l.body)));
            }
            APtr type = a_pi(l.var, l.domain, body.type, l.rel);
            const char* rule =
                l.rel == Relevance::Relevant ? "t_abs" : "t_iabs";
            return {type, node(rule, a, type, {dom, body.deriv})};
          },
          [&](const AApp& ap) -> InferResult {
            InferResult fun = infer_rec(ap.fun);
            auto* pi = as<APi>(fun.type);
            const char* rule =
                ap.rel == Relevance::Relevant ? "t_app" : "t_iapp";
            if (!pi || pi->rel != ap.rel)
              throw TypeError(
                  rule, "cannot apply " + show(ap.fun) + " : " +
                            show(fun.type) +
                            (ap.rel == Relevance::Relevant
                                 ? " (not a relevant function type)"
                                 : " (not an irrelevant function type)"));
            if (ap.rel == Relevance::Irrelevant && !is_value(ap.arg))
              throw TypeError("t_iapp",
                              "irrelevant argument must be a syntactic value: " +
                                  show(ap.arg));
            InferResult arg = infer_rec(ap.arg);
            if (!type_eq(pi->domain, arg.type))
              throw TypeError(rule, "argument " + show(ap.arg) + " has type " +
                                        show(arg.type) + ", expected " +
                                        show(pi->domain));
            APtr result = subst(pi->codomain, pi->var, ap.arg);
            DerivPtr kind = kind_check(result);
            return {result,
                    node(rule, a, result, {fun.deriv, arg.deriv, kind})};
          },
          [&](const ARec& r) -> InferResult {
            auto* pi = as<APi>(r.type);
            if (!pi)
              throw TypeError("t_rec", "rec annotation must be an arrow type, "
                                       "got " +
                                           show(r.type));
            if (!is_value(r.body))
              throw TypeError(
                  "t_rec", "rec body must be a syntactic value: " + show(r.body));
            DerivPtr kind = kind_check(r.type);
            ctx_.emplace_back(r.f, r.type);
            InferResult body;
            try {
              body = infer_rec(r.body);
            } catch (...) {
              ctx_.pop_back();
              throw;
            }
            ctx_.pop_back();
            if (!type_eq(body.type, r.type))
              throw TypeError("t_rec", "rec body has type " + show(body.type) +
                                           ", annotation says " + show(r.type));
            return {r.type, node("t_rec", a, r.type, {kind, body.deriv})};
          },
          [&](const AAbort& ab) -> InferResult {
            DerivPtr kind = kind_check(ab.type);
            return {ab.type, node("t_abort", a, ab.type, {kind})};
          },
          [&](const AEq& q) -> InferResult {
            InferResult l = infer_rec(q.lhs);
            InferResult r = infer_rec(q.rhs);
            return {a_star(), node("t_eq", a, a_star(), {l.deriv, r.deriv})};
          },
          [&](const AJoin& j) -> InferResult {
            APtr eq = a_eq(j.lhs, j.rhs);
            InferResult eqr = infer_rec(eq);
            UPtr lm = unfold(erase(j.lhs));
            UPtr rm = unfold(erase(j.rhs));
            if (!cbv_join(lm, rm, j.steps_lhs, j.steps_rhs)) {
              RunResult lf = run(lm, static_cast<std::uint64_t>(j.steps_lhs));
              RunResult rf = run(rm, static_cast<std::uint64_t>(j.steps_rhs));
              throw TypeError("t_join",
                              "the sides do not join: " + pretty(lf.final) +
                                  " vs " + pretty(rf.final));
            }
            return {eq, node("t_join", a, eq, {eqr.deriv})};
          },
          [&](const AConv& c) -> InferResult { return infer_conv(a, c); },
          [&](const AInjDom& i) -> InferResult {
            InferResult p = infer_rec(i.proof);
            auto* q = as<AEq>(p.type);
            const APi *l = nullptr, *r = nullptr;
            if (q) {
              l = as<APi>(q->lhs);
              r = as<APi>(q->rhs);
            }
            if (!l || !r || l->rel != r->rel)
              throw TypeError("t_injdom",
                              "injdom needs a proof of an equation between "
                              "arrow types of one relevance, got " +
                                  show(p.type));
            APtr type = a_eq(l->domain, r->domain);
            const char* rule =
                l->rel == Relevance::Relevant ? "t_injdom" : "t_iinjdom";
            return {type, node(rule, a, type, {p.deriv})};
          },
          [&](const AInjRng& i) -> InferResult {
            InferResult p = infer_rec(i.proof);
            auto* q = as<AEq>(p.type);
            const APi *l = nullptr, *r = nullptr;
            if (q) {
              l = as<APi>(q->lhs);
              r = as<APi>(q->rhs);
            }
            if (!l || !r || l->rel != r->rel)
              throw TypeError("t_injrng",
                              "injrng needs a proof of an equation between "
                              "arrow types of one relevance, got " +
                                  show(p.type));
            if (!is_value(i.witness))
              throw TypeError("t_injrng",
                              "injrng witness must be a syntactic value: " +
                                  show(i.witness));
            InferResult w = infer_rec(i.witness);
            if (!type_eq(w.type, l->domain))
              throw TypeError("t_injrng", "witness has type " + show(w.type) +
                                              ", expected " + show(l->domain));
            APtr type = a_eq(subst(l->codomain, l->var, i.witness),
                             subst(r->codomain, r->var, i.witness));
            const char* rule =
                l->rel == Relevance::Relevant ? "t_injrng" : "t_iinjrng";
            return {type, node(rule, a, type, {p.deriv, w.deriv})};
          },
          [&](const AInjTCon& i) -> InferResult {
            InferResult p = infer_rec(i.proof);
            auto* q = as<AEq>(p.type);
            const ATCon *l = nullptr, *r = nullptr;
            if (q) {
              l = as<ATCon>(q->lhs);
              r = as<ATCon>(q->rhs);
            }
            if (!l || !r || l->dtype != r->dtype ||
                l->params.size() != r->params.size())
              throw TypeError("t_injtcon",
                              "injtcon needs a proof of an equation between "
                              "applications of one type constructor, got " +
                                  show(p.type));
            if (i.index < 1 || i.index > static_cast<std::int64_t>(l->params.size()))
              throw TypeError("t_injtcon",
                              "index " + std::to_string(i.index) +
                                  " out of range for " + l->dtype);
            APtr type =
                a_eq(l->params[i.index - 1], r->params[i.index - 1]);
            return {type, node("t_injtcon", a, type, {p.deriv})};
          },
          [&](const ATCon& t) -> InferResult {
            const DataDecl* d = sig_.datatype(t.dtype);
            if (!d) throw TypeError("t_tcon", "unknown datatype " + t.dtype);
            std::vector<AArg> args;
            for (auto& p : t.params) args.push_back({p, Relevance::Relevant});
            std::vector<DerivPtr> children;
            tele_check("t_tcon", d->params, args, {}, children);
            return {a_star(), node("t_tcon", a, a_star(), std::move(children))};
          },
          [&](const ADCon& dc) -> InferResult {
            auto ref = sig_.ctor(dc.ctor);
            if (!ref)
              throw TypeError("t_dcon", "unknown constructor " + dc.ctor);
            std::vector<AArg> params;
            for (auto& p : dc.params) params.push_back({p, Relevance::Relevant});
            std::vector<DerivPtr> children;
            ASubst sub = tele_check("t_dcon", ref->data->params, params, {},
                                    children);
            tele_check("t_dcon", ref->ctor->fields, dc.args, sub, children);
            APtr type = a_tcon(ref->data->name, dc.params);
            return {type, node("t_dcon", a, type, std::move(children))};
          },
          [&](const ACase& c) -> InferResult { return infer_case(a, c); },
      },
      a->node);
}

ASubst Checker::tele_check(const std::string& rule, const Telescope& tele,
                           const std::vector<AArg>& args, ASubst sub,
                           std::vector<DerivPtr>& out) {
  if (tele.size() != args.size())
    throw TypeError(rule, "expected " + std::to_string(tele.size()) +
                              " argument(s), got " +
                              std::to_string(args.size()));
  for (size_t i = 0; i < tele.size(); ++i) {
    const TeleEntry& entry = tele[i];
    const AArg& arg = args[i];
    if (entry.rel != arg.rel)
      throw TypeError(rule, "argument " + std::to_string(i + 1) +
                                " has the wrong relevance (expected " +
                                (entry.rel == Relevance::Relevant
                                     ? "relevant"
                                     : "irrelevant") +
                                ")");
    if (entry.rel == Relevance::Irrelevant && !is_value(arg.term))
      throw TypeError(rule,
                      "irrelevant argument must be a syntactic value: " +
                          show(arg.term));
    APtr expected = subst(entry.type, sub);
    InferResult r = infer_rec(arg.term);
    if (!type_eq(r.type, expected))
      throw TypeError(rule, "argument " + show(arg.term) + " has type " +
                                show(r.type) + ", expected " + show(expected));
    out.push_back(r.deriv);
    sub[entry.var] = arg.term;
  }
  return sub;
}

InferResult Checker::infer_conv(const APtr& a, const AConv& c) {
  if (c.proofs.size() != c.vars.size())
    throw TypeError("t_conv", "conv template variables and proofs misaligned");
  std::vector<DerivPtr> children;
  ASubst lhs_sub, rhs_sub;
  UPtr erased_templ = erase(c.templ);
  auto templ_fv = free_vars(erased_templ);
  for (size_t i = 0; i < c.proofs.size(); ++i) {
    const ConvProof& p = c.proofs[i];
    if (p.is_value_proof()) {
      if (!is_value(p.value))
        throw TypeError("t_conv",
                        "conversion proof must be a syntactic value: " +
                            show(p.value));
      InferResult pr = infer_rec(p.value);
      auto* q = as<AEq>(pr.type);
      if (!q)
        throw TypeError("t_conv", "conversion proof " + show(p.value) +
                                      " proves " + show(pr.type) +
                                      ", not an equation");
      children.push_back(pr.deriv);
      lhs_sub[c.vars[i]] = q->lhs;
      rhs_sub[c.vars[i]] = q->rhs;
    } else {
      if (templ_fv.count(c.vars[i]))
        throw TypeError("t_conv",
                        "annotation proof [" + show(p.ann_lhs) + " = " +
                            show(p.ann_rhs) +
                            "] used at a relevant position of the template");
      InferResult lr = infer_rec(p.ann_lhs);
      InferResult rr = infer_rec(p.ann_rhs);
      children.push_back(lr.deriv);
      children.push_back(rr.deriv);
      lhs_sub[c.vars[i]] = p.ann_lhs;
      rhs_sub[c.vars[i]] = p.ann_rhs;
    }
  }
  InferResult subj = infer_rec(c.subject);
  children.push_back(subj.deriv);
  APtr from = subst(c.templ, lhs_sub);
  APtr to = subst(c.templ, rhs_sub);
  if (!type_eq(subj.type, from))
    throw TypeError("t_conv", "conv subject has type " + show(subj.type) +
                                  ", but the template instantiates to " +
                                  show(from));
  DerivPtr kind = kind_check(to);
  children.push_back(kind);
  return {to, node("t_conv", a, to, std::move(children), c.vars, c.templ)};
}

InferResult Checker::infer_case(const APtr& a, const ACase& c) {
  InferResult scrut = infer_rec(c.scrutinee);
  auto* tc = as<ATCon>(scrut.type);
  if (!tc)
    throw TypeError("t_case", "case scrutinee has type " + show(scrut.type) +
                                  ", which is not a datatype");
  const DataDecl* decl = sig_.datatype(tc->dtype);
  if (!decl) throw TypeError("t_case", "unknown datatype " + tc->dtype);
  if (tc->params.size() != decl->params.size())
    throw TypeError("t_case", "scrutinee type " + show(scrut.type) +
                                  " is not fully applied");
  // exactly one branch per declared constructor
  std::map<Name, const ABranch*> by_ctor;
  for (auto& br : c.branches) {
    if (by_ctor.count(br.ctor))
      throw TypeError("t_case", "duplicate branch for " + br.ctor);
    bool declared = false;
    for (auto& ct : decl->ctors)
      if (ct.name == br.ctor) declared = true;
    if (!declared)
      throw TypeError("t_case", br.ctor + " is not a constructor of " +
                                    decl->name);
    by_ctor[br.ctor] = &br;
  }
  for (auto& ct : decl->ctors)
    if (!by_ctor.count(ct.name))
      throw TypeError("t_case", "missing branch for " + ct.name);

  APtr result = c.result;
  std::vector<DerivPtr> children{scrut.deriv};
  for (auto& ct : decl->ctors) {
    const ABranch& br = *by_ctor.at(ct.name);
    if (br.binders.size() != ct.fields.size())
      throw TypeError("t_case", "branch for " + ct.name + " binds " +
                                    std::to_string(br.binders.size()) +
                                    " variable(s), the constructor has " +
                                    std::to_string(ct.fields.size()));
    ASubst sub;
    for (size_t i = 0; i < decl->params.size(); ++i)
      sub[decl->params[i].var] = tc->params[i];
    size_t pushed = 0;
    auto pop_all = [&] { ctx_.resize(ctx_.size() - pushed); };
    try {
      std::vector<AArg> pat_args;
      for (size_t i = 0; i < ct.fields.size(); ++i) {
        if (br.binders[i].rel != ct.fields[i].rel)
          throw TypeError("t_case",
                          "pattern variable " + br.binders[i].name +
                              " has the wrong relevance for " + ct.name);
        APtr ftype = subst(ct.fields[i].type, sub);
        ctx_.emplace_back(br.binders[i].name, ftype);
        ++pushed;
        sub[ct.fields[i].var] = a_var(br.binders[i].name);
        pat_args.push_back({a_var(br.binders[i].name), br.binders[i].rel});
      }
      APtr eq = a_eq(c.scrutinee, a_dcon(ct.name, tc->params, pat_args));
      ctx_.emplace_back(c.eq_var, eq);
      ++pushed;
      InferResult body = infer_rec(br.body);
      pop_all();
      pushed = 0;
      auto body_fv = free_vars(erase(br.body));
      for (auto& b : br.binders)
        if (b.rel == Relevance::Irrelevant && body_fv.count(b.name))
          throw TypeError("t_case", "irrelevant pattern variable " + b.name +
                                        " occurs in the erasure of the branch "
                                        "for " +
                                        ct.name);
      if (body_fv.count(c.eq_var))
        throw TypeError("t_case", "equation variable " + c.eq_var +
                                      " occurs in the erasure of the branch "
                                      "for " +
                                      ct.name);
      if (!result) {
        result = body.type;
      } else if (!type_eq(body.type, result)) {
        throw TypeError("t_case", "branch for " + ct.name + " has type " +
                                      show(body.type) +
                                      ", other branches have " + show(result));
      }
      children.push_back(body.deriv);
    } catch (...) {
      pop_all();
      throw;
    }
  }
  if (!result)
    throw TypeError("t_case",
                    "a case with no branches needs a 'return' ascription");
  DerivPtr kind = kind_check(result);
  children.push_back(kind);
  return {result, node("t_case", a, result, std::move(children))};
}

// ---------------------------------------------------------------------------
// Datatype declarations and programs
// ---------------------------------------------------------------------------

DataDecl check_datatype(const Signature& sig, const RawDataDecl& raw) {
  if (sig.known(raw.name))
    throw TypeError("t_data", "name " + raw.name + " is already defined");
  for (auto& p : raw.params)
    if (p.rel == Relevance::Irrelevant)
      throw TypeError("t_data", "datatype parameter " + p.var +
                                    " may not be irrelevant");
  std::set<Name> seen;
  for (auto& p : raw.params)
    if (!seen.insert(p.var).second)
      throw TypeError("t_data", "duplicate parameter " + p.var);

  // Check parameter kinds left to right.
  {
    Checker ck(sig);
    AContext ctx;
    for (auto& p : raw.params) {
      Checker ck2(sig);
      auto r = ck2.infer_in(ctx, p.type);
      if (!type_eq(r.type, a_star()))
        throw TypeError("t_data", "parameter type " + pretty(p.type) +
                                      " is not a type");
      ctx.emplace_back(p.var, p.type);
    }
  }

  // D is in scope (with no constructors yet) while fields are checked.
  Signature tmp = sig;
  tmp.add_datatype({raw.name, raw.params, {}});

  DataDecl out;
  out.name = raw.name;
  out.params = raw.params;
  std::set<Name> ctor_names;
  for (auto& [cname, ctype] : raw.ctors) {
    if (tmp.known(cname) || ctor_names.count(cname) || cname == raw.name)
      throw TypeError("t_data", "constructor name " + cname +
                                    " is already defined");
    ctor_names.insert(cname);
    // Peel the arrow spine into a telescope and a result.
    Telescope fields;
    APtr cur = ctype;
    while (auto* pi = as<APi>(cur)) {
      fields.push_back({pi->var, pi->domain, pi->rel});
      cur = pi->codomain;
    }
    auto* res = as<ATCon>(cur);
    bool ok = res && res->dtype == raw.name &&
              res->params.size() == raw.params.size();
    if (ok) {
      for (size_t i = 0; i < raw.params.size(); ++i) {
        auto* v = as<AVar>(res->params[i]);
        if (!v || v->name != raw.params[i].var) ok = false;
      }
    }
    if (!ok)
      throw TypeError("t_data",
                      "constructor " + cname + " must target " + raw.name +
                          " applied to exactly its parameters, got " +
                          pretty(cur));
    std::set<Name> fseen = seen;  // fields may not shadow parameters
    for (auto& f : fields)
      if (!fseen.insert(f.var).second)
        throw TypeError("t_data", "duplicate telescope name " + f.var +
                                      " in constructor " + cname);
    // Field types are types under the parameters and earlier fields.
    {
      Checker ck(tmp);
      AContext ctx;
      for (auto& p : raw.params) ctx.emplace_back(p.var, p.type);
      for (auto& f : fields) {
        auto r = ck.infer_in(ctx, f.type);
        if (!type_eq(r.type, a_star()))
          throw TypeError("t_data", "field type " + pretty(f.type) +
                                        " of constructor " + cname +
                                        " is not a type");
        ctx.emplace_back(f.var, f.type);
      }
    }
    out.ctors.push_back({cname, std::move(fields)});
  }
  return out;
}

CheckedProgram check_program(const SourceProgram& prog, const Signature& base) {
  CheckedProgram out;
  out.sig = base;
  for (auto& item : prog.items) {
    if (auto* raw = std::get_if<RawDataDecl>(&item.item)) {
      out.sig.add_datatype(check_datatype(out.sig, *raw));
      continue;
    }
    const DefItem& def = std::get<DefItem>(item.item);
    if (out.sig.known(def.name))
      throw TypeError("t_def", "name " + def.name + " is already defined");
    Checker ck(out.sig);
    ck.check_type(def.type);
    InferResult body = ck.infer(def.body);
    if (!type_eq(body.type, def.type))
      throw TypeError("t_def", def.name + " has type " + pretty(body.type) +
                                   ", its signature says " + pretty(def.type));
    bool val = is_value(def.body);
    out.sig.add_def({def.name, def.type, def.body, val});
    out.defs.push_back({def.name, def.type, def.body, val, body.deriv});
  }
  return out;
}

UPtr runnable_body(const Signature& sig, const Name& def) {
  const Def* d = sig.def(def);
  if (!d) throw TypeError("t_def", "no definition named " + def);
  Checker ck(sig);
  return ck.unfold(erase(d->body));
}

Registry registry_of(const Signature& sig) {
  Registry reg;
  for (auto& d : sig.datatypes()) {
    std::vector<Name> ctors;
    for (auto& c : d.ctors) ctors.push_back(c.name);
    reg.add_datatype(d.name, static_cast<int>(d.params.size()), ctors);
  }
  return reg;
}

}  // namespace trellys

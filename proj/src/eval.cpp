#include "trellys/eval.hpp"

#include "trellys/surface.hpp"

namespace trellys {

namespace {

StepResult stepped(UPtr next) {
  return {StepResult::Kind::Stepped, std::move(next), {}};
}
StepResult stuck(std::string why) {
  return {StepResult::Kind::Stuck, nullptr, std::move(why)};
}

bool is_abort(const UPtr& m) { return as<UAbort>(m) != nullptr; }

}  // namespace

StepResult step(const UPtr& m) {
  if (is_value(m)) return {StepResult::Kind::IsValue, nullptr, {}};
  if (is_abort(m)) return {StepResult::Kind::IsAbort, nullptr, {}};
  if (auto* app = as<UApp>(m)) {
    const UPtr& f = app->fun;
    if (app->rel == Relevance::Relevant) {
      if (is_abort(f)) return stepped(u_abort());  // sc_abort, frame (- n)
      if (!is_value(f)) {
        auto r = step(f);
        if (r.kind == StepResult::Kind::Stepped)
          return stepped(u_app(r.next, app->arg));
        return r;  // Stuck propagates
      }
      const UPtr& a = app->arg;
      if (is_abort(a)) return stepped(u_abort());  // sc_abort, frame (u -)
      if (!is_value(a)) {
        auto r = step(a);
        if (r.kind == StepResult::Kind::Stepped)
          return stepped(u_app(f, r.next));
        return r;
      }
      if (auto* lam = as<ULam>(f); lam && lam->rel == Relevance::Relevant)
        return stepped(subst(lam->body, lam->var, a));  // sc_appbeta
      if (auto* rec = as<URec>(f))
        return stepped(u_app(subst(rec->body, rec->f, f), a));  // sc_apprec
      return stuck("application of non-function value: " + pretty(m));
    }
    // m []
    if (is_abort(f)) return stepped(u_abort());
    if (!is_value(f)) {
      auto r = step(f);
      if (r.kind == StepResult::Kind::Stepped) return stepped(u_iapp(r.next));
      return r;
    }
    if (auto* lam = as<ULam>(f); lam && lam->rel == Relevance::Irrelevant)
      return stepped(lam->body);  // sc_iappbeta
    if (auto* rec = as<URec>(f))
      return stepped(u_iapp(subst(rec->body, rec->f, f)));  // sc_iapprec
    return stuck("irrelevant application of non-function value: " + pretty(m));
  }
  if (auto* dcon = as<UDCon>(m)) {
    // find the leftmost non-value argument (frame d us - ms)
    for (size_t i = 0; i < dcon->args.size(); ++i) {
      const UArg& a = dcon->args[i];
      if (a.placeholder() || is_value(a.term)) continue;
      if (is_abort(a.term)) return stepped(u_abort());
      auto r = step(a.term);
      if (r.kind == StepResult::Kind::Stepped) {
        std::vector<UArg> args = dcon->args;
        args[i] = {r.next};
        return stepped(u_dcon(dcon->ctor, std::move(args)));
      }
      return r;
    }
    return stuck("constructor arguments stuck: " + pretty(m));
  }
  if (auto* c = as<UCase>(m)) {
    const UPtr& s = c->scrutinee;
    if (is_abort(s)) return stepped(u_abort());
    if (!is_value(s)) {
      auto r = step(s);
      if (r.kind == StepResult::Kind::Stepped)
        return stepped(u_case(r.next, c->branches));
      return r;
    }
    auto* dcon = as<UDCon>(s);
    if (!dcon) return stuck("case scrutinee is not a constructor: " + pretty(m));
    for (auto& br : c->branches) {
      if (br.ctor != dcon->ctor) continue;
      std::vector<UPtr> vals;
      for (auto& a : dcon->args)
        if (!a.placeholder()) vals.push_back(a.term);
      if (vals.size() != br.vars.size())
        return stuck("constructor arity mismatch in case: " + pretty(m));
      USubst sub;
      for (size_t i = 0; i < vals.size(); ++i) sub[br.vars[i]] = vals[i];
      return stepped(subst(br.body, sub));  // sc_casebeta
    }
    return stuck("no branch for constructor " + dcon->ctor + ": " + pretty(m));
  }
  return stuck("no rule applies: " + pretty(m));
}

RunResult run(const UPtr& m, std::uint64_t fuel) {
  UPtr cur = m;
  for (std::uint64_t i = 0; i <= fuel; ++i) {
    auto r = step(cur);
    switch (r.kind) {
      case StepResult::Kind::IsValue:
        return {cur, Outcome::Value, i, {}};
      case StepResult::Kind::IsAbort:
        return {cur, Outcome::Abort, i, {}};
      case StepResult::Kind::Stuck:
        return {cur, Outcome::Stuck, i, r.stuck_reason};
      case StepResult::Kind::Stepped:
        if (i == fuel) return {cur, Outcome::OutOfFuel, i, {}};
        cur = r.next;
        break;
    }
  }
  return {cur, Outcome::OutOfFuel, fuel, {}};
}

std::vector<UPtr> trace(const UPtr& m, std::uint64_t fuel, RunResult& result) {
  std::vector<UPtr> states{m};
  UPtr cur = m;
  for (std::uint64_t i = 0; i <= fuel; ++i) {
    auto r = step(cur);
    switch (r.kind) {
      case StepResult::Kind::IsValue:
        result = {cur, Outcome::Value, i, {}};
        return states;
      case StepResult::Kind::IsAbort:
        result = {cur, Outcome::Abort, i, {}};
        return states;
      case StepResult::Kind::Stuck:
        result = {cur, Outcome::Stuck, i, r.stuck_reason};
        return states;
      case StepResult::Kind::Stepped:
        if (i == fuel) {
          result = {cur, Outcome::OutOfFuel, i, {}};
          return states;
        }
        cur = r.next;
        states.push_back(cur);
        break;
    }
  }
  result = {cur, Outcome::OutOfFuel, fuel, {}};
  return states;
}

namespace {

UPtr frontier(const UPtr& m, std::int64_t bound) {
  UPtr cur = m;
  for (std::int64_t i = 0; i < bound; ++i) {
    auto r = step(cur);
    if (r.kind != StepResult::Kind::Stepped) break;
    cur = r.next;
  }
  return cur;
}

}  // namespace

bool cbv_join(const UPtr& m, const UPtr& n, std::int64_t i, std::int64_t j) {
  return alpha_eq(frontier(m, i), frontier(n, j));
}

}  // namespace trellys

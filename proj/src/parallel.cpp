#include "trellys/parallel.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>

namespace trellys {

namespace {

class ReductSet {
 public:
  bool insert(const UPtr& m) {
    auto key = ukey(m);
    if (seen_.count(key)) return false;
    if (items_.size() >= kMaxReducts)
      throw BudgetExceeded("parallel reduct set exceeds " +
                           std::to_string(kMaxReducts) + " elements");
    seen_.insert(std::move(key));
    items_.push_back(m);
    return true;
  }
  const std::vector<UPtr>& items() const { return items_; }
  std::vector<UPtr> take() { return std::move(items_); }

 private:
  std::set<std::string> seen_;
  std::vector<UPtr> items_;
};

std::vector<UPtr> reducts(const UPtr& m);

// All combinations of one reduct per element.
void product(const std::vector<std::vector<UPtr>>& parts, size_t i,
             std::vector<UPtr>& picked,
             const std::function<void(const std::vector<UPtr>&)>& use) {
  if (i == parts.size()) {
    use(picked);
    return;
  }
  for (auto& p : parts[i]) {
    picked.push_back(p);
    product(parts, i + 1, picked, use);
    picked.pop_back();
  }
}

void for_each_product(const std::vector<std::vector<UPtr>>& parts,
                      const std::function<void(const std::vector<UPtr>&)>& use) {
  std::vector<UPtr> picked;
  picked.reserve(parts.size());
  product(parts, 0, picked, use);
}

std::vector<UPtr> reducts(const UPtr& m) {
  ReductSet out;
  std::visit(
      overloaded{
          [&](const UStar&) { out.insert(m); },
          [&](const UVar&) { out.insert(m); },
          [&](const UAbort&) { out.insert(m); },
          [&](const UJoin&) { out.insert(m); },
          [&](const URec& r) {
            for (auto& b : reducts(r.body)) out.insert(u_rec(r.f, b));
          },
          [&](const UPi& p) {
            for_each_product({reducts(p.domain), reducts(p.codomain)},
                             [&](const std::vector<UPtr>& xs) {
                               out.insert(u_pi(p.var, xs[0], xs[1], p.rel));
                             });
          },
          [&](const ULam& l) {
            for (auto& b : reducts(l.body))
              out.insert(l.rel == Relevance::Relevant ? u_lam(l.var, b)
                                                      : u_ilam(b));
          },
          [&](const UEq& q) {
            for_each_product({reducts(q.lhs), reducts(q.rhs)},
                             [&](const std::vector<UPtr>& xs) {
                               out.insert(u_eq(xs[0], xs[1]));
                             });
          },
          [&](const UTCon& t) {
            std::vector<std::vector<UPtr>> parts;
            for (auto& p : t.params) parts.push_back(reducts(p));
            for_each_product(parts, [&](const std::vector<UPtr>& xs) {
              out.insert(u_tcon(t.dtype, xs));
            });
          },
          [&](const UApp& a) {
            auto funs = reducts(a.fun);
            if (a.rel == Relevance::Relevant) {
              auto args = reducts(a.arg);
              // sp_app
              for (auto& f : funs)
                for (auto& x : args) out.insert(u_app(f, x));
              // sp_abort (single frame; deeper aborts arrive by congruence)
              if (as<UAbort>(a.fun) ||
                  (is_value(a.fun) && as<UAbort>(a.arg)))
                out.insert(u_abort());
              if (is_value(a.arg)) {
                if (auto* lam = as<ULam>(a.fun);
                    lam && lam->rel == Relevance::Relevant) {
                  // sp_appbeta
                  for (auto& b : reducts(lam->body))
                    for (auto& x : args) out.insert(subst(b, lam->var, x));
                }
                if (auto* rec = as<URec>(a.fun);
                    rec && is_value(a.fun)) {
                  // sp_apprec: the unrolled occurrence is the original rec
                  for (auto& b : reducts(rec->body))
                    for (auto& x : args)
                      out.insert(u_app(subst(b, rec->f, a.fun), x));
                }
              }
            } else {
              for (auto& f : funs) out.insert(u_iapp(f));
              if (as<UAbort>(a.fun)) out.insert(u_abort());
              if (auto* lam = as<ULam>(a.fun);
                  lam && lam->rel == Relevance::Irrelevant) {
                // sp_iappbeta
                for (auto& b : reducts(lam->body)) out.insert(b);
              }
              if (auto* rec = as<URec>(a.fun); rec && is_value(a.fun)) {
                // sp_iapprec
                for (auto& b : reducts(rec->body))
                  out.insert(u_iapp(subst(b, rec->f, a.fun)));
              }
            }
          },
          [&](const UDCon& d) {
            std::vector<std::vector<UPtr>> parts;
            for (auto& a : d.args)
              if (!a.placeholder()) parts.push_back(reducts(a.term));
            for_each_product(parts, [&](const std::vector<UPtr>& xs) {
              std::vector<UArg> args;
              size_t k = 0;
              for (auto& a : d.args)
                args.push_back(a.placeholder() ? UArg{nullptr} : UArg{xs[k++]});
              out.insert(u_dcon(d.ctor, std::move(args)));
            });
            // sp_abort at the evaluation-context position
            for (auto& a : d.args) {
              if (a.placeholder() || is_value(a.term)) continue;
              if (as<UAbort>(a.term)) out.insert(u_abort());
              break;
            }
          },
          [&](const UCase& c) {
            auto scruts = reducts(c.scrutinee);
            std::vector<std::vector<UPtr>> bodyParts;
            for (auto& br : c.branches) bodyParts.push_back(reducts(br.body));
            // sp_case
            for (auto& s : scruts) {
              for_each_product(bodyParts, [&](const std::vector<UPtr>& xs) {
                std::vector<UBranch> brs;
                for (size_t i = 0; i < c.branches.size(); ++i)
                  brs.push_back({c.branches[i].ctor, c.branches[i].vars, xs[i]});
                out.insert(u_case(s, std::move(brs)));
              });
            }
            if (as<UAbort>(c.scrutinee)) out.insert(u_abort());
            // sp_casebeta
            if (auto* d = as<UDCon>(c.scrutinee); d && is_value(c.scrutinee)) {
              for (size_t i = 0; i < c.branches.size(); ++i) {
                auto& br = c.branches[i];
                if (br.ctor != d->ctor) continue;
                std::vector<UPtr> vals;
                for (auto& a : d->args)
                  if (!a.placeholder()) vals.push_back(a.term);
                if (vals.size() != br.vars.size()) continue;
                std::vector<std::vector<UPtr>> valParts;
                for (auto& v : vals) valParts.push_back(reducts(v));
                auto bodies = reducts(br.body);
                for_each_product(valParts, [&](const std::vector<UPtr>& vs) {
                  for (auto& b : bodies) {
                    USubst sub;
                    for (size_t k = 0; k < vs.size(); ++k)
                      sub[br.vars[k]] = vs[k];
                    out.insert(subst(b, sub));
                  }
                });
              }
            }
          },
      },
      m->node);
  return out.take();
}

}  // namespace

std::vector<UPtr> parallel_reducts(const UPtr& m) {
  if (node_count(m) > kMaxParallelNodes)
    throw BudgetExceeded("term exceeds " + std::to_string(kMaxParallelNodes) +
                         " nodes");
  return reducts(m);
}

std::vector<UPtr> reachable(const UPtr& m, int depth) {
  if (node_count(m) > kMaxParallelNodes)
    throw BudgetExceeded("term exceeds " + std::to_string(kMaxParallelNodes) +
                         " nodes");
  std::set<std::string> seen;
  std::vector<UPtr> all;
  std::vector<UPtr> frontier{m};
  seen.insert(ukey(m));
  all.push_back(m);
  for (int d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<UPtr> next;
    for (auto& t : frontier) {
      if (node_count(t) > kMaxParallelNodes)
        throw BudgetExceeded("reachable term exceeds " +
                             std::to_string(kMaxParallelNodes) + " nodes");
      for (auto& r : reducts(t)) {
        auto key = ukey(r);
        if (seen.count(key)) continue;
        if (all.size() >= kMaxReducts)
          throw BudgetExceeded("reachable set exceeds " +
                               std::to_string(kMaxReducts) + " elements");
        seen.insert(std::move(key));
        all.push_back(r);
        next.push_back(r);
      }
    }
    frontier = std::move(next);
  }
  return all;
}

bool joinable(const UPtr& m, const UPtr& n, int depth) {
  auto rm = reachable(m, depth);
  std::set<std::string> keys;
  for (auto& t : rm) keys.insert(ukey(t));
  auto rn = reachable(n, depth);
  for (auto& t : rn)
    if (keys.count(ukey(t))) return true;
  return false;
}

DiamondResult diamond_check(const UPtr& m) {
  auto rs = parallel_reducts(m);
  std::vector<std::set<std::string>> reduct_keys;
  std::vector<std::vector<UPtr>> reduct_sets;
  for (auto& r : rs) {
    auto rr = parallel_reducts(r);
    std::set<std::string> keys;
    for (auto& t : rr) keys.insert(ukey(t));
    reduct_keys.push_back(std::move(keys));
    reduct_sets.push_back(std::move(rr));
  }
  for (size_t i = 0; i < rs.size(); ++i) {
    for (size_t j = i + 1; j < rs.size(); ++j) {
      bool found = false;
      for (auto& t : reduct_sets[i]) {
        if (reduct_keys[j].count(ukey(t))) {
          found = true;
          break;
        }
      }
      if (!found) return {false, rs[i], rs[j]};
    }
  }
  return {true, nullptr, nullptr};
}

}  // namespace trellys

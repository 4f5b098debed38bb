#include "trellys/erasure.hpp"

namespace trellys {

UPtr erase(const APtr& a) {
  return std::visit(
      overloaded{
          [&](const AStar&) { return u_star(); },
          [&](const AVar& v) { return u_var(v.name); },
          [&](const ARec& r) { return u_rec(r.f, erase(r.body)); },
          [&](const AAbort&) { return u_abort(); },
          [&](const APi& p) {
            return u_pi(p.var, erase(p.domain), erase(p.codomain), p.rel);
          },
          [&](const ALam& l) {
            if (l.rel == Relevance::Irrelevant) return u_ilam(erase(l.body));
            return u_lam(l.var, erase(l.body));
          },
          [&](const AApp& ap) {
            if (ap.rel == Relevance::Irrelevant) return u_iapp(erase(ap.fun));
            return u_app(erase(ap.fun), erase(ap.arg));
          },
          [&](const ATCon& t) {
            std::vector<UPtr> ps;
            ps.reserve(t.params.size());
            for (auto& p : t.params) ps.push_back(erase(p));
            return u_tcon(t.dtype, std::move(ps));
          },
          [&](const ADCon& d) {
            // parameters are deleted; irrelevant arguments leave placeholders
            std::vector<UArg> args;
            args.reserve(d.args.size());
            for (auto& arg : d.args) {
              if (arg.rel == Relevance::Irrelevant)
                args.push_back({nullptr});
              else
                args.push_back({erase(arg.term)});
            }
            return u_dcon(d.ctor, std::move(args));
          },
          [&](const ACase& c) {
            std::vector<UBranch> brs;
            brs.reserve(c.branches.size());
            for (auto& br : c.branches) {
              std::vector<Name> vars;
              for (auto& b : br.binders)
                if (b.rel == Relevance::Relevant) vars.push_back(b.name);
              brs.push_back({br.ctor, std::move(vars), erase(br.body)});
            }
            return u_case(erase(c.scrutinee), std::move(brs));
          },
          [&](const AEq& q) { return u_eq(erase(q.lhs), erase(q.rhs)); },
          [&](const AJoin&) { return u_join(); },
          [&](const AInjDom&) { return u_join(); },
          [&](const AInjRng&) { return u_join(); },
          [&](const AInjTCon&) { return u_join(); },
          [&](const AConv& c) { return erase(c.subject); },
      },
      a->node);
}

UTelescope erase_telescope(const Telescope& t) {
  UTelescope out;
  out.reserve(t.size());
  for (auto& e : t) out.push_back({e.var, erase(e.type), e.rel});
  return out;
}

UContext erase_context(const AContext& g) {
  UContext out;
  out.reserve(g.size());
  for (auto& [n, t] : g) out.emplace_back(n, erase(t));
  return out;
}

UDataDecl erase_datatype(const DataDecl& d) {
  UDataDecl out;
  out.name = d.name;
  out.params = erase_telescope(d.params);
  for (auto& c : d.ctors) out.ctors.push_back({c.name, erase_telescope(c.fields)});
  return out;
}

}  // namespace trellys

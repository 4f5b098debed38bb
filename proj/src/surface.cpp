#include "trellys/surface.hpp"

#include <cassert>
#include <cctype>
#include <cstdint>
#include <functional>
#include <optional>

namespace trellys {

void Registry::add_datatype(const Name& dtype, int param_count,
                            const std::vector<Name>& ctors) {
  tcons_[dtype] = param_count;
  for (auto& c : ctors) dcons_[c] = param_count;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  Ident,
  Number,
  Star,
  Backslash,
  Dot,
  Colon,
  Equals,
  Arrow,
  FatArrow,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Semi,
  Tilde,
  KwData,
  KwWhere,
  KwCase,
  KwOf,
  KwAs,
  KwRec,
  KwAbort,
  KwJoin,
  KwConv,
  KwAt,
  KwInjdom,
  KwInjrng,
  KwInjtcon,
  KwLet,
  KwIn,
  KwReturn,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t number = 0;
  int line = 0, col = 0;
};

const std::map<std::string, Tok> kKeywords = {
    {"data", Tok::KwData},       {"where", Tok::KwWhere},
    {"case", Tok::KwCase},       {"of", Tok::KwOf},
    {"as", Tok::KwAs},           {"rec", Tok::KwRec},
    {"abort", Tok::KwAbort},     {"join", Tok::KwJoin},
    {"conv", Tok::KwConv},       {"at", Tok::KwAt},
    {"injdom", Tok::KwInjdom},   {"injrng", Tok::KwInjrng},
    {"injtcon", Tok::KwInjtcon}, {"let", Tok::KwLet},
    {"in", Tok::KwIn},           {"return", Tok::KwReturn},
};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto peek = [&](size_t k = 0) -> char {
    return i + k < text.size() ? text[i + k] : '\0';
  };
  auto advance = [&]() {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < text.size()) {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
      continue;
    }
    if (c == '-' && peek(1) == '-') {
      while (i < text.size() && text[i] != '\n') advance();
      continue;
    }
    int tl = line, tc = col;
    auto push = [&](Tok k, std::string s = {}) {
      out.push_back({k, std::move(s), 0, tl, tc});
    };
    if (c == '-' && peek(1) == '>') {
      advance();
      advance();
      push(Tok::Arrow);
      continue;
    }
    if (c == '=' && peek(1) == '>') {
      advance();
      advance();
      push(Tok::FatArrow);
      continue;
    }
    switch (c) {
      case '*': advance(); push(Tok::Star); continue;
      case '\\': advance(); push(Tok::Backslash); continue;
      case '.': advance(); push(Tok::Dot); continue;
      case ':': advance(); push(Tok::Colon); continue;
      case '=': advance(); push(Tok::Equals); continue;
      case '(': advance(); push(Tok::LParen); continue;
      case ')': advance(); push(Tok::RParen); continue;
      case '[': advance(); push(Tok::LBracket); continue;
      case ']': advance(); push(Tok::RBracket); continue;
      case '{': advance(); push(Tok::LBrace); continue;
      case '}': advance(); push(Tok::RBrace); continue;
      case ';': advance(); push(Tok::Semi); continue;
      case '~': advance(); push(Tok::Tilde); continue;
      default: break;
    }
    if (c >= '0' && c <= '9') {
      std::int64_t v = 0;
      bool overflow = false;
      while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
        v = v * 10 + (text[i] - '0');
        if (v > INT32_MAX) overflow = true;
        advance();
      }
      if (overflow)
        throw ParseError("numeric literal exceeds 2^31-1", tl, tc);
      Token t{Tok::Number, {}, v, tl, tc};
      out.push_back(t);
      continue;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      std::string s;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) ||
              text[i] == '\'')) {
        s += text[i];
        advance();
      }
      auto it = kKeywords.find(s);
      if (it != kKeywords.end())
        push(it->second, s);
      else
        push(Tok::Ident, s);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Tok::End, {}, 0, line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

// While a conv template is being parsed the tildes it owns collect here; a
// null frame blocks tildes (inside proof expressions).
struct TemplateFrame {
  std::vector<ConvProof> proofs;
  std::vector<Name> vars;
};

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  Registry* reg;  // never null; const use unless parsing a program
  bool mutable_registry;
  std::vector<TemplateFrame*> frames;
  int depth = 0;      // (, [, { nesting
  int rec_depth = 0;  // parse_expr recursion
  int last_line = 1;  // line of the last consumed token

  struct RecGuard {
    Parser& p;
    explicit RecGuard(Parser& p_) : p(p_) {
      if (++p.rec_depth > 2000)
        throw ParseError("expression nesting too deep", p.cur().line,
                         p.cur().col);
    }
    ~RecGuard() { --p.rec_depth; }
  };

  const Token& cur() const { return toks[pos]; }
  const Token& ahead(size_t k) const {
    return toks[std::min(pos + k, toks.size() - 1)];
  }
  Token eat() {
    Token t = toks[pos++];
    switch (t.kind) {
      case Tok::LParen:
      case Tok::LBracket:
      case Tok::LBrace:
        ++depth;
        break;
      case Tok::RParen:
      case Tok::RBracket:
      case Tok::RBrace:
        --depth;
        break;
      default:
        break;
    }
    last_line = t.line;
    return t;
  }
  // Application spines do not continue onto a new line outside brackets;
  // this is what separates top-level items.
  bool spine_continues() const {
    return depth > 0 || cur().line == last_line;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().col);
  }
  Token expect(Tok k, const char* what) {
    if (cur().kind != k) fail(std::string("expected ") + what);
    return eat();
  }
  bool at(Tok k) const { return cur().kind == k; }

  // ---- expressions ------------------------------------------------------

  APtr numeral(std::int64_t n) {
    APtr acc = a_dcon("Z");
    for (std::int64_t k = 0; k < n; ++k)
      acc = a_dcon("S", {}, {{acc, Relevance::Relevant}});
    return acc;
  }

  bool starts_atom(Tok k) const {
    switch (k) {
      case Tok::Ident:
      case Tok::Number:
      case Tok::Star:
      case Tok::LParen:
      case Tok::KwAbort:
      case Tok::KwJoin:
      case Tok::KwInjdom:
      case Tok::KwInjrng:
      case Tok::KwInjtcon:
      case Tok::Tilde:
        return true;
      default:
        return false;
    }
  }

  APtr parse_expr() {
    RecGuard guard(*this);
    switch (cur().kind) {
      case Tok::Backslash: {
        eat();
        bool irr = at(Tok::LBracket);
        if (irr) eat();
        Name x = expect(Tok::Ident, "binder name").text;
        expect(Tok::Colon, "':' in binder");
        APtr dom = irr ? parse_expr() : parse_arrow();
        if (irr) expect(Tok::RBracket, "']' after irrelevant binder");
        expect(Tok::Dot, "'.' after binder");
        APtr body = parse_expr();
        return a_lam(x, dom, body,
                     irr ? Relevance::Irrelevant : Relevance::Relevant);
      }
      case Tok::KwRec: {
        eat();
        Name f = expect(Tok::Ident, "rec name").text;
        expect(Tok::Colon, "':' after rec name");
        APtr type = parse_arrow();
        expect(Tok::Dot, "'.' after rec annotation");
        APtr body = parse_expr();
        return a_rec(f, type, body);
      }
      case Tok::KwConv: {
        eat();
        APtr subject = parse_expr();
        expect(Tok::KwAt, "'at' in conv");
        TemplateFrame frame;
        frames.push_back(&frame);
        APtr templ = parse_expr();
        frames.pop_back();
        return a_conv(subject, std::move(frame.proofs), std::move(frame.vars),
                      templ);
      }
      case Tok::KwCase: {
        eat();
        APtr scrut = parse_expr();
        expect(Tok::KwAs, "'as' in case");
        expect(Tok::LBracket, "'[' before equation name");
        Name y = expect(Tok::Ident, "equation name").text;
        expect(Tok::RBracket, "']' after equation name");
        APtr result;
        if (at(Tok::KwReturn)) {
          eat();
          result = parse_expr();
        }
        expect(Tok::KwOf, "'of' in case");
        expect(Tok::LBrace, "'{' before branches");
        std::vector<ABranch> branches;
        while (!at(Tok::RBrace)) {
          Name d = expect(Tok::Ident, "constructor name in branch").text;
          std::vector<APatVar> binders;
          while (!at(Tok::FatArrow)) {
            if (at(Tok::LBracket)) {
              eat();
              Name v = expect(Tok::Ident, "pattern variable").text;
              expect(Tok::RBracket, "']' after pattern variable");
              binders.push_back({v, Relevance::Irrelevant});
            } else {
              Name v = expect(Tok::Ident, "pattern variable").text;
              binders.push_back({v, Relevance::Relevant});
            }
          }
          eat();  // =>
          APtr body = parse_expr();
          branches.push_back({d, std::move(binders), body});
          if (at(Tok::Semi))
            eat();
          else
            break;
        }
        expect(Tok::RBrace, "'}' after branches");
        return a_case(scrut, y, std::move(branches), result);
      }
      case Tok::KwLet: {
        eat();
        Name x = expect(Tok::Ident, "let name").text;
        expect(Tok::Colon, "':' in let");
        // no top-level '=' here: it would swallow the binding's own '='
        APtr type = parse_arrow_noeq();
        expect(Tok::Equals, "'=' in let");
        APtr rhs = parse_expr();
        expect(Tok::KwIn, "'in' after let binding");
        APtr body = parse_expr();
        return a_app(a_lam(x, type, body), rhs);
      }
      default:
        return parse_arrow();
    }
  }

  APtr parse_arrow() {
    // (x:A) -> B  |  [x:A] -> B  |  eq (-> arrow)?
    if (at(Tok::LParen) && ahead(1).kind == Tok::Ident &&
        ahead(2).kind == Tok::Colon) {
      eat();
      Name x = eat().text;
      eat();  // colon
      APtr dom = parse_expr();
      expect(Tok::RParen, "')' after dependent domain");
      expect(Tok::Arrow, "'->' after dependent domain");
      APtr cod = parse_arrow();
      return a_pi(x, dom, cod);
    }
    if (at(Tok::LBracket) && ahead(1).kind == Tok::Ident &&
        ahead(2).kind == Tok::Colon) {
      eat();
      Name x = eat().text;
      eat();  // colon
      APtr dom = parse_expr();
      expect(Tok::RBracket, "']' after irrelevant domain");
      expect(Tok::Arrow, "'->' after irrelevant domain");
      APtr cod = parse_arrow();
      return a_pi(x, dom, cod, Relevance::Irrelevant);
    }
    APtr lhs = parse_eq();
    if (at(Tok::Arrow)) {
      eat();
      APtr cod = parse_arrow();
      std::set<Name> avoid = free_vars(cod);
      auto dfv = free_vars(lhs);
      avoid.insert(dfv.begin(), dfv.end());
      return a_pi(fresh_name("x", avoid), lhs, cod);
    }
    return lhs;
  }

  APtr parse_arrow_noeq() {
    if ((at(Tok::LParen) || at(Tok::LBracket)) &&
        ahead(1).kind == Tok::Ident && ahead(2).kind == Tok::Colon)
      return parse_arrow();  // a parenthesized domain delimits itself
    APtr lhs = parse_app();
    if (at(Tok::Arrow)) {
      eat();
      APtr cod = parse_arrow_noeq();
      std::set<Name> avoid = free_vars(cod);
      auto dfv = free_vars(lhs);
      avoid.insert(dfv.begin(), dfv.end());
      return a_pi(fresh_name("x", avoid), lhs, cod);
    }
    return lhs;
  }

  APtr parse_eq() {
    APtr lhs = parse_app();
    if (at(Tok::Equals)) {
      eat();
      APtr rhs = parse_app();
      if (at(Tok::Equals)) fail("'=' is not associative");
      return a_eq(lhs, rhs);
    }
    return lhs;
  }

  struct Spine {
    APtr term;        // relevant argument
    bool bracketed;   // irrelevant argument / parameter group
  };

  APtr parse_app() {
    // Bare constructor and datatype heads absorb the whole spine.
    if (at(Tok::Ident) && (reg->is_dcon(cur().text) || reg->is_tcon(cur().text))) {
      Token head = eat();
      std::vector<Spine> spine;
      while (spine_continues()) {
        if (at(Tok::LBracket)) {
          // '[x:' here would be an irrelevant arrow, not an argument
          if (ahead(1).kind == Tok::Ident && ahead(2).kind == Tok::Colon) break;
          eat();
          APtr e = parse_expr();
          expect(Tok::RBracket, "']' after bracketed argument");
          spine.push_back({e, true});
        } else if (starts_atom(cur().kind)) {
          spine.push_back({parse_atom(), false});
        } else {
          break;
        }
      }
      if (reg->is_dcon(head.text)) {
        int nparams = reg->dcon_params(head.text);
        std::vector<APtr> params;
        size_t k = 0;
        while (k < spine.size() && static_cast<int>(k) < nparams &&
               spine[k].bracketed) {
          params.push_back(spine[k].term);
          ++k;
        }
        std::vector<AArg> args;
        for (; k < spine.size(); ++k)
          args.push_back({spine[k].term, spine[k].bracketed
                                             ? Relevance::Irrelevant
                                             : Relevance::Relevant});
        return a_dcon(head.text, std::move(params), std::move(args));
      }
      std::vector<APtr> params;
      for (auto& s : spine) {
        if (s.bracketed)
          throw ParseError("type constructor " + head.text +
                               " takes no bracketed arguments",
                           head.line, head.col);
        params.push_back(s.term);
      }
      return a_tcon(head.text, std::move(params));
    }
    APtr fun = parse_atom();
    while (spine_continues()) {
      if (at(Tok::LBracket)) {
        if (ahead(1).kind == Tok::Ident && ahead(2).kind == Tok::Colon) break;
        eat();
        APtr arg = parse_expr();
        expect(Tok::RBracket, "']' after irrelevant argument");
        fun = a_app(fun, arg, Relevance::Irrelevant);
      } else if (starts_atom(cur().kind)) {
        fun = a_app(fun, parse_atom());
      } else {
        break;
      }
    }
    return fun;
  }

  APtr parse_atom() {
    switch (cur().kind) {
      case Tok::Star:
        eat();
        return a_star();
      case Tok::Number: {
        Token t = eat();
        return numeral(t.number);
      }
      case Tok::Ident: {
        Token t = eat();
        if (reg->is_dcon(t.text)) return a_dcon(t.text);
        if (reg->is_tcon(t.text)) return a_tcon(t.text);
        return a_var(t.text);
      }
      case Tok::LParen: {
        eat();
        APtr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::KwAbort: {
        eat();
        return a_abort(parse_atom());
      }
      case Tok::KwJoin: {
        Token t = eat();
        std::int64_t i = 100, j = 100;
        if (at(Tok::Number)) {
          i = eat().number;
          if (!at(Tok::Number))
            throw ParseError("join expects two step counts", t.line, t.col);
          j = eat().number;
        }
        expect(Tok::Colon, "':' after join");
        APtr e = parse_eq();
        auto* q = as<AEq>(e);
        if (!q)
          throw ParseError("join requires an equation 'a = b'", t.line, t.col);
        return a_join(q->lhs, q->rhs, i, j);
      }
      case Tok::KwInjdom: {
        eat();
        return a_injdom(parse_atom());
      }
      case Tok::KwInjrng: {
        eat();
        APtr p = parse_atom();
        APtr w = parse_atom();
        return a_injrng(p, w);
      }
      case Tok::KwInjtcon: {
        Token t = eat();
        if (!at(Tok::Number))
          throw ParseError("injtcon expects an index literal", t.line, t.col);
        std::int64_t k = eat().number;
        if (k < 1)
          throw ParseError("injtcon index must be at least 1", t.line, t.col);
        return a_injtcon(k, parse_atom());
      }
      case Tok::Tilde: {
        Token t = eat();
        if (frames.empty() || frames.back() == nullptr)
          throw ParseError(frames.empty()
                               ? "'~' is only allowed inside a conv template"
                               : "nested '~' inside a conv proof",
                           t.line, t.col);
        TemplateFrame& f = *frames.back();
        ConvProof proof;
        if (at(Tok::LParen)) {
          eat();
          frames.push_back(nullptr);
          APtr v = parse_expr();
          frames.pop_back();
          expect(Tok::RParen, "')' after conv proof");
          proof = {v, nullptr, nullptr};
        } else if (at(Tok::LBracket)) {
          eat();
          frames.push_back(nullptr);
          APtr e = parse_expr();
          frames.pop_back();
          expect(Tok::RBracket, "']' after conv annotation");
          auto* q = as<AEq>(e);
          if (!q)
            throw ParseError("conv annotation must have the form [a = b]",
                             t.line, t.col);
          proof = {nullptr, q->lhs, q->rhs};
        } else if (at(Tok::Ident)) {
          // shorthand: ~x for a variable proof
          proof = {a_var(eat().text), nullptr, nullptr};
        } else {
          throw ParseError(
              "'~' must be followed by '(value)', '[a = b]' or a variable",
              t.line, t.col);
        }
        Name var = "#" + std::to_string(f.vars.size() + 1);
        f.vars.push_back(var);
        f.proofs.push_back(std::move(proof));
        return a_var(var);
      }
      default:
        fail("expected an expression");
    }
  }

  // ---- programs ----------------------------------------------------------

  Telescope parse_param_groups() {
    Telescope t;
    while (at(Tok::LParen) || at(Tok::LBracket)) {
      bool irr = at(Tok::LBracket);
      eat();
      Name x = expect(Tok::Ident, "parameter name").text;
      expect(Tok::Colon, "':' in parameter");
      APtr type = parse_expr();
      if (irr)
        expect(Tok::RBracket, "']' after parameter");
      else
        expect(Tok::RParen, "')' after parameter");
      t.push_back({x, type, irr ? Relevance::Irrelevant : Relevance::Relevant});
    }
    return t;
  }

  SourceProgram parse_program() {
    SourceProgram prog;
    while (!at(Tok::End)) {
      if (at(Tok::KwData)) {
        eat();
        Name d = expect(Tok::Ident, "datatype name").text;
        Telescope params = parse_param_groups();
        expect(Tok::KwWhere, "'where' in data declaration");
        expect(Tok::LBrace, "'{' before constructors");
        RawDataDecl decl;
        decl.name = d;
        decl.params = params;
        // visible to its own constructor types (recursive occurrences)
        reg->add_datatype(d, static_cast<int>(params.size()), {});
        std::vector<Name> ctor_names;
        while (!at(Tok::RBrace)) {
          Name c = expect(Tok::Ident, "constructor name").text;
          expect(Tok::Colon, "':' in constructor declaration");
          APtr type = parse_expr();
          decl.ctors.emplace_back(c, type);
          ctor_names.push_back(c);
          if (at(Tok::Semi))
            eat();
          else
            break;
        }
        expect(Tok::RBrace, "'}' after constructors");
        reg->add_datatype(d, static_cast<int>(params.size()), ctor_names);
        prog.items.push_back({std::move(decl)});
        continue;
      }
      // name : type ; name = body
      Token nameTok = expect(Tok::Ident, "definition name");
      expect(Tok::Colon, "':' after definition name");
      APtr type = parse_expr();
      Token nameTok2 = expect(Tok::Ident, "definition body");
      if (nameTok2.text != nameTok.text)
        throw ParseError("definition '" + nameTok2.text +
                             "' does not match its signature '" +
                             nameTok.text + "'",
                         nameTok2.line, nameTok2.col);
      expect(Tok::Equals, "'=' in definition");
      APtr body = parse_expr();
      prog.items.push_back({DefItem{nameTok.text, type, body}});
    }
    return prog;
  }
};

}  // namespace

SourceProgram parse_program(std::string_view text, Registry& reg) {
  Parser p;
  p.toks = lex(text);
  p.reg = &reg;
  p.mutable_registry = true;
  return p.parse_program();
}

APtr parse_expr(std::string_view text, const Registry& reg) {
  Parser p;
  p.toks = lex(text);
  p.reg = const_cast<Registry*>(&reg);
  p.mutable_registry = false;
  APtr e = p.parse_expr();
  if (!p.at(Tok::End)) p.fail("trailing input after expression");
  return e;
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

namespace {

constexpr int kExpr = 0, kArrow = 1, kEq = 2, kApp = 3, kAtom = 4;

struct APrettyCtx {
  std::map<Name, const ConvProof*> tilde;
};

std::optional<std::int64_t> a_numeral(const APtr& e) {
  std::int64_t n = 0;
  const AExpr* cur = e.get();
  while (true) {
    auto* d = std::get_if<ADCon>(&cur->node);
    if (!d || !d->params.empty()) return std::nullopt;
    if (d->ctor == "Z" && d->args.empty()) return n;
    if (d->ctor == "S" && d->args.size() == 1 &&
        d->args[0].rel == Relevance::Relevant) {
      ++n;
      if (n > 1000) return std::nullopt;
      cur = d->args[0].term.get();
      continue;
    }
    return std::nullopt;
  }
}

std::optional<std::int64_t> u_numeral(const UPtr& e) {
  std::int64_t n = 0;
  const UExpr* cur = e.get();
  while (true) {
    auto* d = std::get_if<UDCon>(&cur->node);
    if (!d) return std::nullopt;
    if (d->ctor == "Z" && d->args.empty()) return n;
    if (d->ctor == "S" && d->args.size() == 1 && !d->args[0].placeholder()) {
      ++n;
      if (n > 1000) return std::nullopt;
      cur = d->args[0].term.get();
      continue;
    }
    return std::nullopt;
  }
}

void pa(std::string& out, const APtr& e, int prec, const APrettyCtx& ctx);

void pa_paren(std::string& out, const APtr& e, int level, int prec,
              const APrettyCtx& ctx, const std::function<void()>& body) {
  if (level < prec) {
    out += "(";
    body();
    out += ")";
  } else {
    body();
  }
}

void pa(std::string& out, const APtr& e, int prec, const APrettyCtx& ctx) {
  if (auto n = a_numeral(e)) {
    out += std::to_string(*n);
    return;
  }
  std::visit(
      overloaded{
          [&](const AStar&) { out += "*"; },
          [&](const AVar& v) {
            auto it = ctx.tilde.find(v.name);
            if (it != ctx.tilde.end()) {
              const ConvProof* p = it->second;
              if (p->is_value_proof()) {
                out += "~(";
                pa(out, p->value, kExpr, ctx);
                out += ")";
              } else {
                out += "~[";
                pa(out, p->ann_lhs, kApp, ctx);
                out += " = ";
                pa(out, p->ann_rhs, kApp, ctx);
                out += "]";
              }
              return;
            }
            out += v.name;
          },
          [&](const ARec& r) {
            pa_paren(out, e, kExpr, prec, ctx, [&] {
              out += "rec " + r.f + " : ";
              pa(out, r.type, kArrow, ctx);
              out += " . ";
              pa(out, r.body, kExpr, ctx);
            });
          },
          [&](const AAbort& a) {
            pa_paren(out, e, kApp, prec, ctx, [&] {
              out += "abort ";
              pa(out, a.type, kAtom, ctx);
            });
          },
          [&](const APi& p) {
            pa_paren(out, e, kArrow, prec, ctx, [&] {
              if (p.rel == Relevance::Relevant &&
                  !free_vars(p.codomain).count(p.var)) {
                pa(out, p.domain, kEq, ctx);
                out += " -> ";
                pa(out, p.codomain, kArrow, ctx);
              } else {
                out += p.rel == Relevance::Relevant ? "(" : "[";
                out += p.var + " : ";
                pa(out, p.domain, kExpr, ctx);
                out += p.rel == Relevance::Relevant ? ")" : "]";
                out += " -> ";
                pa(out, p.codomain, kArrow, ctx);
              }
            });
          },
          [&](const ALam& l) {
            pa_paren(out, e, kExpr, prec, ctx, [&] {
              out += "\\";
              if (l.rel == Relevance::Irrelevant) {
                out += "[" + l.var + " : ";
                pa(out, l.domain, kExpr, ctx);
                out += "]";
              } else {
                out += l.var + " : ";
                pa(out, l.domain, kArrow, ctx);
              }
              out += " . ";
              pa(out, l.body, kExpr, ctx);
            });
          },
          [&](const AApp& a) {
            pa_paren(out, e, kApp, prec, ctx, [&] {
              pa(out, a.fun, kApp, ctx);
              if (a.rel == Relevance::Relevant) {
                out += " ";
                pa(out, a.arg, kAtom, ctx);
              } else {
                out += " [";
                pa(out, a.arg, kExpr, ctx);
                out += "]";
              }
            });
          },
          [&](const ATCon& t) {
            int level = t.params.empty() ? kAtom : kApp;
            pa_paren(out, e, level, prec, ctx, [&] {
              out += t.dtype;
              for (auto& p : t.params) {
                out += " ";
                pa(out, p, kAtom, ctx);
              }
            });
          },
          [&](const ADCon& d) {
            int level = (d.params.empty() && d.args.empty()) ? kAtom : kApp;
            pa_paren(out, e, level, prec, ctx, [&] {
              out += d.ctor;
              for (auto& p : d.params) {
                out += " [";
                pa(out, p, kExpr, ctx);
                out += "]";
              }
              for (auto& a : d.args) {
                if (a.rel == Relevance::Relevant) {
                  out += " ";
                  pa(out, a.term, kAtom, ctx);
                } else {
                  out += " [";
                  pa(out, a.term, kExpr, ctx);
                  out += "]";
                }
              }
            });
          },
          [&](const ACase& c) {
            pa_paren(out, e, kExpr, prec, ctx, [&] {
              out += "case ";
              pa(out, c.scrutinee, kExpr, ctx);
              out += " as [" + c.eq_var + "]";
              if (c.result) {
                out += " return ";
                pa(out, c.result, kExpr, ctx);
              }
              out += " of { ";
              bool first = true;
              for (auto& br : c.branches) {
                if (!first) out += " ; ";
                first = false;
                out += br.ctor;
                for (auto& b : br.binders) {
                  out += " ";
                  if (b.rel == Relevance::Irrelevant)
                    out += "[" + b.name + "]";
                  else
                    out += b.name;
                }
                out += " => ";
                pa(out, br.body, kExpr, ctx);
              }
              out += " }";
            });
          },
          [&](const AEq& q) {
            pa_paren(out, e, kEq, prec, ctx, [&] {
              pa(out, q.lhs, kApp, ctx);
              out += " = ";
              pa(out, q.rhs, kApp, ctx);
            });
          },
          [&](const AJoin& j) {
            pa_paren(out, e, kExpr, prec, ctx, [&] {
              out += "join ";
              if (j.steps_lhs != 100 || j.steps_rhs != 100)
                out += std::to_string(j.steps_lhs) + " " +
                       std::to_string(j.steps_rhs) + " ";
              out += ": ";
              pa(out, j.lhs, kApp, ctx);
              out += " = ";
              pa(out, j.rhs, kApp, ctx);
            });
          },
          [&](const AInjDom& i) {
            pa_paren(out, e, kApp, prec, ctx, [&] {
              out += "injdom ";
              pa(out, i.proof, kAtom, ctx);
            });
          },
          [&](const AInjRng& i) {
            pa_paren(out, e, kApp, prec, ctx, [&] {
              out += "injrng ";
              pa(out, i.proof, kAtom, ctx);
              out += " ";
              pa(out, i.witness, kAtom, ctx);
            });
          },
          [&](const AInjTCon& i) {
            pa_paren(out, e, kApp, prec, ctx, [&] {
              out += "injtcon " + std::to_string(i.index) + " ";
              pa(out, i.proof, kAtom, ctx);
            });
          },
          [&](const AConv& c) {
            pa_paren(out, e, kExpr, prec, ctx, [&] {
              out += "conv ";
              pa(out, c.subject, kExpr, ctx);
              out += " at ";
              APrettyCtx inner = ctx;
              for (size_t i = 0; i < c.vars.size(); ++i)
                inner.tilde[c.vars[i]] = &c.proofs[i];
              pa(out, c.templ, kExpr, inner);
            });
          },
      },
      e->node);
}

void pu(std::string& out, const UPtr& e, int prec);

void pu_paren(std::string& out, int level, int prec,
              const std::function<void()>& body) {
  if (level < prec) {
    out += "(";
    body();
    out += ")";
  } else {
    body();
  }
}

void pu(std::string& out, const UPtr& e, int prec) {
  if (auto n = u_numeral(e)) {
    out += std::to_string(*n);
    return;
  }
  std::visit(
      overloaded{
          [&](const UStar&) { out += "*"; },
          [&](const UVar& v) { out += v.name; },
          [&](const URec& r) {
            pu_paren(out, kExpr, prec, [&] {
              out += "rec " + r.f + " . ";
              pu(out, r.body, kExpr);
            });
          },
          [&](const UAbort&) { out += "abort"; },
          [&](const UPi& p) {
            pu_paren(out, kArrow, prec, [&] {
              if (p.rel == Relevance::Relevant &&
                  !free_vars(p.codomain).count(p.var)) {
                pu(out, p.domain, kEq);
                out += " -> ";
                pu(out, p.codomain, kArrow);
              } else {
                out += p.rel == Relevance::Relevant ? "(" : "[";
                out += p.var + " : ";
                pu(out, p.domain, kExpr);
                out += p.rel == Relevance::Relevant ? ")" : "]";
                out += " -> ";
                pu(out, p.codomain, kArrow);
              }
            });
          },
          [&](const ULam& l) {
            pu_paren(out, kExpr, prec, [&] {
              if (l.rel == Relevance::Irrelevant) {
                out += "\\[] . ";
              } else {
                out += "\\" + l.var + " . ";
              }
              pu(out, l.body, kExpr);
            });
          },
          [&](const UApp& a) {
            pu_paren(out, kApp, prec, [&] {
              pu(out, a.fun, kApp);
              if (a.rel == Relevance::Relevant) {
                out += " ";
                pu(out, a.arg, kAtom);
              } else {
                out += " []";
              }
            });
          },
          [&](const UTCon& t) {
            pu_paren(out, t.params.empty() ? kAtom : kApp, prec, [&] {
              out += t.dtype;
              for (auto& p : t.params) {
                out += " ";
                pu(out, p, kAtom);
              }
            });
          },
          [&](const UDCon& d) {
            pu_paren(out, d.args.empty() ? kAtom : kApp, prec, [&] {
              out += d.ctor;
              for (auto& a : d.args) {
                out += " ";
                if (a.placeholder())
                  out += "[]";
                else
                  pu(out, a.term, kAtom);
              }
            });
          },
          [&](const UCase& c) {
            pu_paren(out, kExpr, prec, [&] {
              out += "case ";
              pu(out, c.scrutinee, kExpr);
              out += " of { ";
              bool first = true;
              for (auto& br : c.branches) {
                if (!first) out += " ; ";
                first = false;
                out += br.ctor;
                for (auto& v : br.vars) out += " " + v;
                out += " => ";
                pu(out, br.body, kExpr);
              }
              out += " }";
            });
          },
          [&](const UEq& q) {
            pu_paren(out, kEq, prec, [&] {
              pu(out, q.lhs, kApp);
              out += " = ";
              pu(out, q.rhs, kApp);
            });
          },
          [&](const UJoin&) { out += "join"; },
      },
      e->node);
}

}  // namespace

std::string pretty(const APtr& e) {
  std::string out;
  APrettyCtx ctx;
  pa(out, e, kExpr, ctx);
  return out;
}

std::string pretty(const UPtr& e) {
  std::string out;
  pu(out, e, kExpr);
  return out;
}

}  // namespace trellys

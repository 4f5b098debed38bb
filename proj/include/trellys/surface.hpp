#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trellys/syntax.hpp"

// Concrete syntax: a lexer and recursive-descent parser for .tre files and
// single expressions, plus pretty-printers for both languages. Numeric
// literals desugar to S/Z chains, `a -> b` to a dependent arrow with an unused
// binder, `let` to an immediate application, and a bare `join : a = b` to
// `join 100 100 : a = b`.

namespace trellys {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" +
                           std::to_string(col_)),
        line(line_),
        col(col_) {}
};

struct DefItem {
  Name name;
  APtr type;
  APtr body;
};

// A datatype declaration as parsed: constructor types are raw arrows, peeled
// into telescopes when the declaration is checked.
struct RawDataDecl {
  Name name;
  Telescope params;
  std::vector<std::pair<Name, APtr>> ctors;
};

struct ProgramItem {
  std::variant<RawDataDecl, DefItem> item;
};

struct SourceProgram {
  std::vector<ProgramItem> items;
};

// Arities the parser needs to tell datatype parameters from constructor
// arguments and type constructors from variables.
class Registry {
 public:
  void add_datatype(const Name& dtype, int param_count,
                    const std::vector<Name>& ctors);
  bool is_tcon(const Name& n) const { return tcons_.count(n) > 0; }
  bool is_dcon(const Name& n) const { return dcons_.count(n) > 0; }
  int dcon_params(const Name& n) const { return dcons_.at(n); }

 private:
  std::map<Name, int> tcons_;  // datatype -> parameter count
  std::map<Name, int> dcons_;  // constructor -> datatype parameter count
};

// Parses a whole program; data declarations extend reg as they are read.
SourceProgram parse_program(std::string_view text, Registry& reg);

// Parses a single expression (e.g. for the join/run debugging commands).
APtr parse_expr(std::string_view text, const Registry& reg);

std::string pretty(const APtr& e);
std::string pretty(const UPtr& e);

}  // namespace trellys

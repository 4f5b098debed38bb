#pragma once

#include "trellys/syntax.hpp"

// The erasure |.| from annotated to unannotated expressions: type annotations,
// conversion proofs, constructor parameters and irrelevant arguments are
// deleted; irrelevant binders and arguments leave placeholders.

namespace trellys {

UPtr erase(const APtr& a);

struct UTeleEntry {
  Name var;
  UPtr type;
  Relevance rel;
};
using UTelescope = std::vector<UTeleEntry>;

UTelescope erase_telescope(const Telescope& t);

// Variable contexts, pointwise erased.
using AContext = std::vector<std::pair<Name, APtr>>;
using UContext = std::vector<std::pair<Name, UPtr>>;
UContext erase_context(const AContext& g);

struct UCtorDecl {
  Name name;
  UTelescope fields;
};
struct UDataDecl {
  Name name;
  UTelescope params;
  std::vector<UCtorDecl> ctors;
};
UDataDecl erase_datatype(const DataDecl& d);

}  // namespace trellys

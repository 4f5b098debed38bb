#pragma once

#include "trellys/typecheck.hpp"

namespace trellys {

// Source of the shipped prelude: Nat, Bool, Empty, Maybe, arithmetic, the two
// vector types, and the string/regexp matching declarations.
extern const char* const kPreludeSource;

// Parses and checks the prelude into a fresh signature.
CheckedProgram check_prelude();

// Cached prelude signature.
const Signature& prelude();

}  // namespace trellys

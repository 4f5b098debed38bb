#include "trellys/prelude.hpp"

namespace trellys {

const char* const kPreludeSource = R"PRELUDE(
-- Prelude: loaded before every file unless --no-prelude.

data Nat where { Z : Nat ; S : (n : Nat) -> Nat }

data Bool where { true : Bool ; false : Bool }

data Empty where { }

data Maybe (a : *) where { Nothing : Maybe a ; Just : (x : a) -> Maybe a }

plus : Nat -> Nat -> Nat
plus = rec pl : Nat -> Nat -> Nat . \x : Nat . \y : Nat .
  case x as [w] of { Z => y ; S k => S (pl k y) }

isZero : Nat -> Bool
isZero = \x : Nat . case x as [w] of { Z => true ; S k => false }

pred : Nat -> Nat
pred = \x : Nat . case x as [w] of { Z => Z ; S k => k }

minus : Nat -> Nat -> Nat
minus = rec mi : Nat -> Nat -> Nat . \x : Nat . \y : Nat .
  case y as [w] of { Z => x ; S k => mi (pred x) k }

lt : Nat -> Nat -> Bool
lt = \x : Nat . \y : Nat . isZero (minus (S x) y)

-- Truncating division; aborts on a zero divisor.
div : Nat -> Nat -> Nat
div = rec dv : Nat -> Nat -> Nat . \x : Nat . \y : Nat .
  case isZero y as [w] of {
    true => abort Nat ;
    false => case lt x y as [w2] of {
      true => Z ;
      false => S (dv (minus x y) y)
    }
  }

-- Vectors in the parameters-plus-equations style: lengths stay at runtime,
-- the shape proofs are erased.
data Vec (a : *) (n : Nat) where {
  nil : [p : n = Z] -> Vec a n ;
  cons : (m : Nat) -> (x : a) -> (xs : Vec a m) -> [p : n = S m] -> Vec a n
}

-- The fully erased variant: lengths vanish at runtime too.
data Vec' (a : *) (n : Nat) where {
  nil' : [p : n = Z] -> Vec' a n ;
  cons' : [m : Nat] -> [p : n = S m] -> (x : a) -> (xs : Vec' a m) -> Vec' a n
}

data Char where { CA : Char ; CB : Char }

data String where {
  snil : String ;
  scons : (c : Char) -> (s : String) -> String
}

append : String -> String -> String
append = rec ap : String -> String -> String . \s : String . \t : String .
  case s as [w] of { snil => t ; scons c s' => scons c (ap s' t) }

data Regexp where { RCh : (c : Char) -> Regexp ; RStar : (r : Regexp) -> Regexp }

-- Match evidence, with the indices elaborated into parameters and equations.
data Match (s : String) (r : Regexp) where {
  MChar : (x : Char) -> [p : s = scons x snil] -> [q : r = RCh x] -> Match s r ;
  MStar0 : (r' : Regexp) -> [p : s = snil] -> [q : r = RStar r'] -> Match s r ;
  MStar1 : (r' : Regexp) -> (s1 : String) -> (s2 : String) ->
           (m1 : Match s1 r') -> (m2 : Match s2 (RStar r')) ->
           [p : s = append s1 s2] -> [q : r = RStar r'] -> Match s r
}
)PRELUDE";

CheckedProgram check_prelude() {
  Registry reg;
  SourceProgram prog = parse_program(kPreludeSource, reg);
  Signature empty;
  return check_program(prog, empty);
}

const Signature& prelude() {
  static const Signature sig = check_prelude().sig;
  return sig;
}

}  // namespace trellys

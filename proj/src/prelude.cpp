#include "lsym/syntax.hpp"

namespace lsym {

// Standard library, written in the surface language itself.  Lists use the
// sum encoding nil = inj1 0, cons h t = inj2 (h, t).  Definitions that are
// not referenced from main are dropped during lowering.
const char *prelude_text() {
  return R"PRELUDE(
-- lists
def nil = inj1 0
def cons h t = inj2 (h, t)
def isNil l = case l { inj1 z -> 1 ; inj2 c -> 0 }
def head l = case l { inj1 z -> 0 ; inj2 c -> fst c }
def tail l = case l { inj1 z -> inj1 0 ; inj2 c -> snd c }
def map f l = case l { inj1 z -> inj1 0 ; inj2 c -> cons (f (fst c)) (map f (snd c)) }
def append a b = case a { inj1 z -> b ; inj2 c -> cons (fst c) (append (snd c) b) }
def foldr f z l = case l { inj1 n -> z ; inj2 c -> f (fst c) (foldr f z (snd c)) }
def foldl f z l = case l { inj1 n -> z ; inj2 c -> foldl f (f z (fst c)) (snd c) }
def length l = case l { inj1 z -> 0 ; inj2 c -> 1 + length (snd c) }
def nth n l = case l { inj1 z -> 0 ; inj2 c -> if n then nth (n - 1) (snd c) else fst c }
def removeNth n l = case l { inj1 z -> inj1 0 ; inj2 c -> if n then cons (fst c) (removeNth (n - 1) (snd c)) else snd c }
def range k n = if n - k then cons k (range (k + 1) n) else inj1 0

-- party sets
def psetToList P = case P { {} -> inj1 0 ; {p} \/ Q -> cons p (psetToList Q) }
def psetSize P = case P { {} -> 0 ; {p} \/ Q -> 1 + psetSize Q }
def psetFromList l = case l { inj1 z -> {} ; inj2 c -> fst c \/ psetFromList (snd c) }
-- all subsets of P with exactly k members
def subsets k P = if k then case P { {} -> inj1 0 ; {p} \/ Q -> append (map (fun S -> p \/ S) (subsets (k - 1) Q)) (subsets k Q) } else cons {} nil

-- combinators
def const x y = x
def unroll n f z = if n then unroll (n - 1) f (f z) else z

-- embed a cleartext constant as a share among Q
def embed Q v = par Q (share [Q -> Q] v)
-- broadcast a cleartext value known at parties p to everyone in P
def send p P v =
  par (p \/ P)
  let s = par p (share [p -> p] v) in
  reveal [p -> P] s
-- shared randomness: every party contributes one input, all learn the sum
def randomSeed P =
  par P (foldr (fun a b -> a + b) 0 (map (fun q -> send q P (par q read)) (psetToList P)))

-- deterministic PRG steps
def lcg s = s * 6364136223846793005 + 1442695040888963407
def randIn s lo hi =
  let span = (hi - lo) + 1 in
  let s2 = lcg s in
  lo + (((s2 % span) + span) % span)

-- seed-driven permutation by repeated pick-and-remove
def shuffleWith seed l =
  let n = length l in
  if n then
    let s2 = lcg seed in
    let k = ((s2 % n) + n) % n in
    cons (nth k l) (shuffleWith s2 (removeNth k l))
  else inj1 0

-- comparison whose (one-bit) outcome is revealed to all of P
def revealLte P a b =
  par P
  let c = a <= b in
  reveal [P -> P] c
def insert P x l = case l { inj1 z -> cons x nil ; inj2 c -> if revealLte P x (fst c) then cons x l else cons (fst c) (insert P x (snd c)) }
def isort P l = foldr (insert P) nil l
def revealAll P l = par P (map (fun e -> reveal [P -> P] e) l)

-- insertion sort over cleartext values
def insertClear x l = case l { inj1 z -> cons x nil ; inj2 c -> if x <= fst c then cons x l else cons (fst c) (insertClear x (snd c)) }
def sortClear l = foldr insertClear nil l

-- one party's input, shared among P
def contribute P q = par (q \/ P) (share [q -> P] (par q read))

-- move a list of shares held by Q back to shares among all of P.  The list
-- spine lives at Q, so elements are pulled out by index from mode P.
def reshareBack Q P l =
  par (Q \/ P)
  let n = send Q P (par Q (length l)) in
  map (fun i -> share [Q -> P] (par Q (nth i l))) (range 0 n)

-- one committee pass: hand the shares to Q, let Q shuffle with randomness
-- only Q knows, then share back to P
def lwzPass P l Q =
  par P
  let lq = map (fun e -> share [P -> Q] e) l in
  let seed = randomSeed Q in
  let shuf = par Q (shuffleWith seed lq) in
  reshareBack Q P shuf
-- oblivious shuffle resilient to t colluding parties: every committee of
-- size |P| - t permutes the list once
def lwz t P l = foldl (lwzPass P) l (subsets (psetSize P - t) P)
)PRELUDE";
}

}  // namespace lsym

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lsym {

using PartyId = std::string;
using PartySet = std::set<PartyId>;

std::string pset_to_string(const PartySet &p);

enum class BinOp { Add, Sub, Mul, Mod, Eq, Lt, Le, Ge, And, Or, Xor, Union };

const char *binop_symbol(BinOp op);
// Integer denotation of the non-union ops: wrapping 64-bit arithmetic,
// comparisons and logical ops yield 1/0, x % 0 == x.
int64_t eval_int_binop(BinOp op, int64_t a, int64_t b);
// cond(c, t, e): t if c != 0 else e.
int64_t eval_cond(int64_t c, int64_t t, int64_t e);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Atoms: all operands are variables (ANF).
struct AVar { std::string name; };
struct ALit { int64_t value = 0; };
struct APSetLit { PartySet parties; };
struct ABinOp { BinOp op = BinOp::Add; std::string lhs, rhs; };
struct AMux { std::string cond, on_true, on_false; };
struct AInj { int index = 1; std::string payload; };
struct APair { std::string first, second; };
struct AProj { int index = 1; std::string payload; };
struct AFun { std::string self, param; ExprPtr body; };
struct ARef { std::string init; };
struct ADeref { std::string ref; };
struct AAssign { std::string ref, value; };
struct ARead {};
struct AWrite { std::string value; };
struct AShare { std::string src, dst, payload; };
struct AReveal { std::string src, dst, payload; };

using Atom = std::variant<AVar, ALit, APSetLit, ABinOp, AMux, AInj, APair, AProj,
                          AFun, ARef, ADeref, AAssign, ARead, AWrite, AShare, AReveal>;

struct EAtom { Atom atom; };
struct ECaseSum {
  std::string subject;
  std::string binder1; ExprPtr branch1;
  std::string binder2; ExprPtr branch2;
};
struct ECasePSet {
  std::string subject;
  ExprPtr on_empty;
  std::string head_binder, tail_binder; ExprPtr on_cons;
};
struct EApp { std::string fn, arg; };
struct EPar { std::string pset; ExprPtr body; };
struct ELet { std::string binder; ExprPtr bound; ExprPtr body; };
// Nonzero test on a cleartext integer; lowered from surface `if`.
struct EIf { std::string cond; ExprPtr on_true, on_false; };

struct Expr {
  std::variant<EAtom, ECaseSum, ECasePSet, EApp, EPar, ELet, EIf> node;
};

ExprPtr mk_expr(Expr e);
ExprPtr mk_atom(Atom a);

std::set<std::string> free_vars(const ExprPtr &e);
std::set<std::string> free_vars_atom(const Atom &a);

// Structural equality (exact names, no alpha).
bool expr_equal(const ExprPtr &a, const ExprPtr &b);
bool atom_equal(const Atom &a, const Atom &b);
// Equality up to consistent renaming of bound variables.
bool alpha_equal(const ExprPtr &a, const ExprPtr &b);

// One-line description of the head of an expression, for traces.
std::string expr_head(const ExprPtr &e);
std::string atom_head(const Atom &a);

// Checks the ANF/closedness invariants; throws std::runtime_error on violation.
void check_core_invariants(const ExprPtr &e, const PartySet &principals);

std::string pretty(const ExprPtr &e);

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string &msg, int line, int col)
      : std::runtime_error(msg), line(line), col(col) {}
};

struct SurfaceDef;   // opaque surface tree, defined in surface.hpp
struct SurfaceExpr;

struct Program {
  std::vector<PartyId> principals;
  std::vector<std::shared_ptr<SurfaceDef>> defs;  // includes main
};

Program parse(const std::string &text);
// Lower the whole program: defs referenced from main become nested
// let-bound recursive functions around main's body.
ExprPtr lower(const Program &p);
// Parse text as a whole program and lower it in one go.
ExprPtr parse_and_lower(const std::string &text);

// The standard prelude (lists, pset helpers, unroll, embed, send,
// synchronized randomness, shuffles) as surface text.
const char *prelude_text();

}  // namespace lsym

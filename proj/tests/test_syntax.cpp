#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lsym/st_eval.hpp"

using namespace lsym;

namespace {

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ExprPtr lower_text(const std::string &text) {
  return parse_and_lower(std::string(prelude_text()) + "\n" + text);
}

STOutcome run_text(const std::string &text, uint64_t fuel = 100000) {
  Program p = parse(text);
  ExprPtr core = lower(p);
  PartySet parties(p.principals.begin(), p.principals.end());
  InputOracle io;
  return st_run(st_initial(core, parties), io, fuel);
}

}  // namespace

TEST_CASE("smallest par form parses and runs") {
  STOutcome out = run_text("principal A\ndef main = par {A} 1");
  REQUIRE(out.kind == STOutcome::Terminal);
  CHECK(render_value(out.final) == "1@{A}");
}

TEST_CASE("malformed let is a parse error with position") {
  try {
    parse("principal A\ndef main = let x = in 3");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line == 2);
    CHECK(e.col > 0);
  }
}

TEST_CASE("binops are lowered to ANF lets") {
  ExprPtr core = parse_and_lower("principal A\ndef main = 1 + 2");
  // the operator's operands must be variables after lowering
  CHECK(std::holds_alternative<ELet>(core->node));
  STOutcome out = run_text("principal A\ndef main = 1 + 2");
  REQUIRE(out.kind == STOutcome::Terminal);
  CHECK(render_value(out.final) == "3@{A}");
}

TEST_CASE("free variables") {
  ExprPtr letx = mk_expr(Expr{ELet{"x", mk_atom(Atom{AVar{"y"}}), mk_atom(Atom{AVar{"x"}})}});
  CHECK(free_vars(letx) == std::set<std::string>{"y"});

  // both occurrences bound: the self binder and the parameter
  ExprPtr app = mk_expr(Expr{EApp{"z", "x"}});
  Atom fn{AFun{"z", "x", app}};
  CHECK(free_vars_atom(fn).empty());

  ExprPtr cs = mk_expr(Expr{ECaseSum{"x", "y", mk_atom(Atom{AVar{"y"}}), "z",
                                     mk_atom(Atom{AVar{"w"}})}});
  CHECK(free_vars(cs) == std::set<std::string>{"x", "w"});
}

TEST_CASE("alpha equivalence") {
  ExprPtr a = mk_expr(Expr{ELet{"x", mk_atom(Atom{ALit{1}}), mk_atom(Atom{AVar{"x"}})}});
  ExprPtr b = mk_expr(Expr{ELet{"y", mk_atom(Atom{ALit{1}}), mk_atom(Atom{AVar{"y"}})}});
  ExprPtr c = mk_expr(Expr{ELet{"y", mk_atom(Atom{ALit{2}}), mk_atom(Atom{AVar{"y"}})}});
  CHECK(alpha_equal(a, b));
  CHECK_FALSE(expr_equal(a, b));
  CHECK_FALSE(alpha_equal(a, c));
}

TEST_CASE("unused definitions are dropped even if ill-formed for main") {
  ExprPtr core = parse_and_lower("principal A\ndef unusedHelper x = someUnknownThing x\ndef main = 7");
  PartySet ps{"A"};
  check_core_invariants(core, ps);
}

TEST_CASE("integer op table") {
  CHECK(eval_int_binop(BinOp::Mod, 7, 0) == 7);
  CHECK(eval_int_binop(BinOp::Mod, -7, 3) == eval_int_binop(BinOp::Mod, -7, 3));
  CHECK(eval_int_binop(BinOp::Lt, 3, 4) == 1);
  CHECK(eval_int_binop(BinOp::Ge, 3, 4) == 0);
  CHECK(eval_int_binop(BinOp::Xor, 0b110, 0b011) == 0b101);
  CHECK(eval_cond(0, 8, 9) == 9);
  CHECK(eval_cond(2, 8, 9) == 8);
  // wrapping, not UB
  CHECK(eval_int_binop(BinOp::Mul, INT64_MAX, 2) == -2);
}

TEST_CASE("pretty round-trips through the parser for the whole corpus") {
  std::filesystem::path corpus(LSYM_CORPUS_DIR);
  REQUIRE(std::filesystem::exists(corpus));
  size_t n = 0;
  for (const auto &entry : std::filesystem::directory_iterator(corpus)) {
    if (!entry.is_directory()) continue;
    std::string text = slurp(entry.path() / "program.lsym");
    Program prog = parse(std::string(prelude_text()) + "\n" + text);
    ExprPtr core1 = lower(prog);
    std::string header = "principal";
    for (const auto &p : prog.principals) header += " " + p;
    ExprPtr core2 = parse_and_lower(header + "\ndef main = " + pretty(core1));
    CHECK_MESSAGE(alpha_equal(core1, core2), entry.path().filename().string());
    PartySet ps(prog.principals.begin(), prog.principals.end());
    check_core_invariants(core1, ps);
    n++;
  }
  CHECK(n >= 12);
}

TEST_CASE("prelude itself lowers cleanly") {
  ExprPtr core = lower_text("principal A B C\ndef main = psetSize {A, B, C}");
  PartySet ps{"A", "B", "C"};
  check_core_invariants(core, ps);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "lsym/st_eval.hpp"

using namespace lsym;

namespace {

struct Run {
  STOutcome out;
  InputOracle io;
  std::string trace;
};

Run run(const std::string &text, std::map<PartyId, std::deque<int64_t>> inputs = {},
        uint64_t fuel = 200000, bool with_prelude = false) {
  std::string full = with_prelude ? std::string(prelude_text()) + "\n" + text : text;
  Program p = parse(full);
  ExprPtr core = lower(p);
  PartySet parties(p.principals.begin(), p.principals.end());
  Run r;
  r.io.inputs = std::move(inputs);
  std::ostringstream tr;
  r.out = st_run(st_initial(core, parties), r.io, fuel,
                 [&](const std::string &l) { tr << l << "\n"; });
  r.trace = tr.str();
  return r;
}

}  // namespace

TEST_CASE("share produces an encrypted value at the destination") {
  // m = {A,B}, p = {A}, q = {A,B}, payload 5 at {A}
  Run r = run("principal A B\n"
              "def main = par {A, B} share [{A} -> {A, B}] (par {A} 5)");
  REQUIRE(r.out.kind == STOutcome::Terminal);
  CHECK(render_value(r.out.final) == "5^enc#{A,B}@{A,B}");
}

TEST_CASE("operations on encrypted operands stay encrypted") {
  Run r = run("principal A B\n"
              "def main = par {A, B}\n"
              "  let x = share [{A} -> {A, B}] (par {A} 3) in\n"
              "  let y = share [{A} -> {A, B}] (par {A} 4) in\n"
              "  x >= y");
  REQUIRE(r.out.kind == STOutcome::Terminal);
  CHECK(render_value(r.out.final) == "0^enc#{A,B}@{A,B}");
}

TEST_CASE("mixed-protocol operands are stuck") {
  Run r = run("principal A B\n"
              "def main = par {A, B}\n"
              "  let x = share [{A} -> {A, B}] (par {A} 3) in\n"
              "  x + 1");
  REQUIRE(r.out.kind == STOutcome::Stuck);
  CHECK(r.out.stuck_info.rule == "ST-Int-BinOp");
}

TEST_CASE("nested par example ends at 1@{A}") {
  Run r = run("principal A B C\n"
              "def main = par {A, B}\n"
              "  let x = par {A} 1 in\n"
              "  let y = par {B} x in\n"
              "  let z = par {C} 2 in\n"
              "  x");
  REQUIRE(r.out.kind == STOutcome::Terminal);
  CHECK(render_value(r.out.final) == "1@{A}");
  // y and z degraded to * in the terminal environment
  CHECK(r.out.config.env.m.at("y")->star);
  CHECK(r.out.config.env.m.at("z")->star);
}

TEST_CASE("assignment requires the creating mode") {
  Run r = run("principal A B\n"
              "def main = par {A, B}\n"
              "  let r = par {A} (ref 0) in\n"
              "  r := 1");
  REQUIRE(r.out.kind == STOutcome::Stuck);
  CHECK(r.out.stuck_info.rule == "ST-Assign");
}

TEST_CASE("references work at the creating mode") {
  Run r = run("principal A\n"
              "def main = par {A}\n"
              "  let r = ref 10 in\n"
              "  let u = r := !r + 5 in\n"
              "  !r");
  REQUIRE(r.out.kind == STOutcome::Terminal);
  CHECK(render_value(r.out.final) == "15@{A}");
}

TEST_CASE("read and write need a singleton mode") {
  Run r = run("principal A B\ndef main = par {A, B} read", {{"A", {1}}, {"B", {1}}});
  REQUIRE(r.out.kind == STOutcome::Stuck);
  CHECK(r.out.stuck_info.rule == "ST-Read");

  Run w = run("principal A B\ndef main = par {A, B} (write 1)");
  REQUIRE(w.out.kind == STOutcome::Stuck);
  CHECK(w.out.stuck_info.rule == "ST-Write");
}

TEST_CASE("inputs are consumed in order and outputs recorded per party") {
  Run r = run("principal A\n"
              "def main = par {A}\n"
              "  let x = read in\n"
              "  let y = read in\n"
              "  let u = write (x - y) in\n"
              "  write (y - x)",
              {{"A", {10, 4}}});
  REQUIRE(r.out.kind == STOutcome::Terminal);
  CHECK(r.io.outputs.at("A") == std::vector<int64_t>{6, -6});
}

TEST_CASE("modulo by zero is the identity, clear and encrypted") {
  Run c = run("principal A\ndef main = par {A} (7 % 0)");
  REQUIRE(c.out.kind == STOutcome::Terminal);
  CHECK(render_value(c.out.final) == "7@{A}");

  Run e = run("principal A B\n"
              "def main = par {A, B}\n"
              "  let x = share [{A} -> {A, B}] (par {A} 9) in\n"
              "  let z = share [{A} -> {A, B}] (par {A} 0) in\n"
              "  reveal [{A, B} -> {A, B}] (x % z)");
  REQUIRE(e.out.kind == STOutcome::Terminal);
  CHECK(render_value(e.out.final) == "9@{A,B}");
}

TEST_CASE("reveal requires enc#p payloads") {
  Run r = run("principal A B\ndef main = par {A, B} (reveal [{A, B} -> {A, B}] 5)");
  REQUIRE(r.out.kind == STOutcome::Stuck);
  CHECK(r.out.stuck_info.rule == "ST-Reveal");
}

TEST_CASE("share distributes over pairs and sums") {
  Run r = run("principal A B\n"
              "def main = par {A, B}\n"
              "  let p = par {A} (inj2 (1, 2)) in\n"
              "  share [{A} -> {A, B}] p");
  REQUIRE(r.out.kind == STOutcome::Terminal);
  CHECK(render_value(r.out.final) ==
        "inj2((1^enc#{A,B}@{A,B}, 2^enc#{A,B}@{A,B})@{A,B})@{A,B}");
}

TEST_CASE("mux selects without branching") {
  Run r = run("principal A B\n"
              "def main = par {A, B}\n"
              "  let a = share [{A} -> {A, B}] (par {A} 42) in\n"
              "  let b = share [{B} -> {A, B}] (par {B} 17) in\n"
              "  let m = mux if a <= b then a else b in\n"
              "  reveal [{A, B} -> {A, B}] m");
  REQUIRE(r.out.kind == STOutcome::Terminal);
  CHECK(render_value(r.out.final) == "17@{A,B}");
}

TEST_CASE("if cannot branch on an encrypted condition") {
  Run r = run("principal A B\n"
              "def main = par {A, B}\n"
              "  let a = share [{A} -> {A, B}] (par {A} 1) in\n"
              "  if a then 1 else 2");
  REQUIRE(r.out.kind == STOutcome::Stuck);
}

TEST_CASE("divergence runs out of fuel") {
  Run r = run("principal A\ndef main = let w = fun [w] x -> w x in w 0", {}, 500);
  CHECK(r.out.kind == STOutcome::OutOfFuel);
  CHECK(r.out.steps == 500);
}

TEST_CASE("millionaires reveals only the comparison bit") {
  std::string prog =
      "principal A B\n"
      "def main =\n"
      "  let P = {A, B} in\n"
      "  par P\n"
      "  let sa = share [{A} -> P] (par {A} read) in\n"
      "  let sb = share [{B} -> P] (par {B} read) in\n"
      "  reveal [P -> P] (sa >= sb)";
  Run r = run(prog, {{"A", {10}}, {"B", {5}}});
  REQUIRE(r.out.kind == STOutcome::Terminal);
  CHECK(render_value(r.out.final) == "1@{A,B}");
}

TEST_CASE("traces are deterministic and well-formed") {
  std::string prog = "principal A B\n"
                     "def main = par {A, B}\n"
                     "  let x = share [{A} -> {A, B}] (par {A} 3) in\n"
                     "  reveal [{A, B} -> {A, B}] x";
  Run r1 = run(prog);
  Run r2 = run(prog);
  CHECK(r1.trace == r2.trace);
  CHECK(!r1.trace.empty());
  // every line: step, rule, mode, head
  std::istringstream in(r1.trace);
  std::string line;
  int expect = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string step, rule, mode, head;
    std::getline(ls, step, '\t');
    std::getline(ls, rule, '\t');
    std::getline(ls, mode, '\t');
    std::getline(ls, head, '\t');
    CHECK(step == std::to_string(expect++));
    CHECK(!rule.empty());
    CHECK(mode.front() == '{');
    CHECK(!head.empty());
  }
}

TEST_CASE("case on party sets visits members smallest-first") {
  Run r = run("principal A B C\ndef main = psetToList {C, A, B}", {}, 200000, true);
  REQUIRE(r.out.kind == STOutcome::Terminal);
  // heads come out A, B, C
  CHECK(render_value(r.out.final).rfind("inj2(({A}", 0) == 0);
}

TEST_CASE("unroll iterates a function") {
  Run r = run("principal A\ndef main = unroll 5 (fun x -> x * 2) 1", {}, 200000, true);
  REQUIRE(r.out.kind == STOutcome::Terminal);
  CHECK(render_value(r.out.final) == "32@{A}");
}

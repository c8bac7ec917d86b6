#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lsym/meta.hpp"

using namespace lsym;

namespace {

struct Prepared {
  ExprPtr core;
  PartySet parties;
  InputOracle io;
};

Prepared prep(const std::string &text,
              std::map<PartyId, std::deque<int64_t>> inputs = {}) {
  Program p = parse(text);
  Prepared r;
  r.core = lower(p);
  r.parties = PartySet(p.principals.begin(), p.principals.end());
  r.io.inputs = std::move(inputs);
  return r;
}

const std::string kMillionaires =
    "principal A B\n"
    "def main =\n"
    "  let P = {A, B} in\n"
    "  par P\n"
    "  let sa = share [{A} -> P] (par {A} read) in\n"
    "  let sb = share [{B} -> P] (par {B} read) in\n"
    "  let r = reveal [P -> P] (sa >= sb) in\n"
    "  r";

const std::string kStuckAssign =
    "principal A B\n"
    "def main = par {A, B}\n"
    "  let r = par {A} (ref 0) in\n"
    "  r := 1";

std::vector<uint64_t> seeds(size_t n) {
  std::vector<uint64_t> s;
  for (size_t i = 1; i <= n; i++) s.push_back(i);
  return s;
}

}  // namespace

TEST_CASE("st determinism holds") {
  Prepared p = prep(kMillionaires, {{"A", {10}}, {"B", {5}}});
  MetaResult r = check_st_determinism(p.core, p.parties, p.io, 5, 100000);
  CHECK_MESSAGE(r.status == MetaResult::Pass, r.detail);
}

TEST_CASE("terminal correspondence holds on millionaires") {
  Prepared p = prep(kMillionaires, {{"A", {10}}, {"B", {5}}});
  MetaResult r = check_terminal_correspondence(p.core, p.parties, p.io, seeds(10), 100000);
  CHECK_MESSAGE(r.status == MetaResult::Pass, r.detail);
}

TEST_CASE("terminal correspondence holds with a trailing sync") {
  // ends on the reveal itself: exercises the final-value-only comparison
  std::string prog = kMillionaires.substr(0, kMillionaires.rfind("let r")) +
                     "reveal [P -> P] (sa >= sb)";
  Prepared p = prep(prog, {{"A", {10}}, {"B", {5}}});
  MetaResult r = check_terminal_correspondence(p.core, p.parties, p.io, seeds(10), 100000);
  CHECK_MESSAGE(r.status == MetaResult::Pass, r.detail);
}

TEST_CASE("stuck soundness holds on the bad assignment") {
  Prepared p = prep(kStuckAssign);
  MetaResult r = check_stuck_soundness(p.core, p.parties, p.io, seeds(10), 100000);
  CHECK_MESSAGE(r.status == MetaResult::Pass, r.detail);
}

TEST_CASE("stuck soundness is inconclusive for a terminating program") {
  Prepared p = prep("principal A B\ndef main = 1");
  MetaResult r = check_stuck_soundness(p.core, p.parties, p.io, seeds(3), 100000);
  CHECK(r.status == MetaResult::Inconclusive);
}

TEST_CASE("confluence across seeds") {
  Prepared p = prep(kMillionaires, {{"A", {3}}, {"B", {9}}});
  MetaResult r = check_confluence(p.core, p.parties, p.io, seeds(25), 100000);
  CHECK_MESSAGE(r.status == MetaResult::Pass, r.detail);
}

TEST_CASE("one-step diamond on the nested par program") {
  Prepared p = prep("principal A B C\n"
                    "def main = par {A, B}\n"
                    "  let x = par {A} 1 in\n"
                    "  let y = par {B} x in\n"
                    "  x");
  MetaResult r = check_diamond(p.core, p.parties, p.io, 5000);
  CHECK_MESSAGE(r.status == MetaResult::Pass, r.detail);
}

TEST_CASE("diamond through a sync point") {
  Prepared p = prep("principal A B\n"
                    "def main = par {A, B}\n"
                    "  let s = share [{A} -> {A, B}] (par {A} 4) in\n"
                    "  let r = reveal [{A, B} -> {A, B}] s in\n"
                    "  r");
  MetaResult r = check_diamond(p.core, p.parties, p.io, 5000);
  CHECK_MESSAGE(r.status == MetaResult::Pass, r.detail);
}

TEST_CASE("stuck parties stay stuck while others are scheduled") {
  Prepared p = prep(kStuckAssign);
  MetaResult r =
      check_stuck_preservation(p.core, p.parties, p.io, seeds(5), 100000, 1000);
  CHECK_MESSAGE(r.status == MetaResult::Pass, r.detail);
}

TEST_CASE("report lines carry the verdict and the stats") {
  MetaResult r;
  r.status = MetaResult::Pass;
  r.stats["runs"] = "10";
  std::string line = meta_report_line("terminal-correspondence", "millionaires", 10, r);
  CHECK(line.find("terminal-correspondence") != std::string::npos);
  CHECK(line.find("millionaires") != std::string::npos);
  CHECK(line.find("PASS") != std::string::npos);
  CHECK(line.find("runs=10") != std::string::npos);
}

TEST_CASE("generated terms are closed, well-formed, and cover the grammar") {
  std::map<std::string, int> coverage;
  for (uint64_t seed = 1; seed <= 60; seed++) {
    TermGenerator gen(seed, 1 + static_cast<int>(seed % 4));
    ExprPtr t = gen.generate();
    REQUIRE(t);
    CHECK(free_vars(t).empty());
    check_core_invariants(t, gen.parties);
    for (const auto &[k, v] : gen.coverage) coverage[k] += v;
  }
  // every production fires somewhere in the batch
  for (const auto &[k, v] : coverage) CHECK_MESSAGE(v > 0, k);
  CHECK(coverage.size() >= 15);
}

TEST_CASE("generation is deterministic per seed") {
  TermGenerator a(12, 3), b(12, 3), c(13, 3);
  CHECK(expr_equal(a.generate(), b.generate()));
  CHECK_FALSE(expr_equal(a.generate(), c.generate()));
}

TEST_CASE("the metatheory holds on a sample of generated terms") {
  int checked = 0;
  for (uint64_t seed = 1; seed <= 25; seed++) {
    TermGenerator gen(seed, 2);
    ExprPtr t = gen.generate();
    InputOracle io;
    MetaResult det = check_st_determinism(t, gen.parties, io, 2, 20000);
    CHECK(det.status != MetaResult::Fail);
    MetaResult corr = check_terminal_correspondence(t, gen.parties, io, seeds(5), 20000);
    CHECK_MESSAGE(corr.status != MetaResult::Fail, corr.detail);
    if (corr.status == MetaResult::Pass) checked++;
  }
  CHECK(checked > 10);  // most generated terms terminate
}

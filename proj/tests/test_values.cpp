#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lsym/values.hpp"

using namespace lsym;

namespace {

const PartySet AB{"A", "B"};
const PartySet A{"A"};
const PartySet B{"B"};

ValP vint(int64_t v, PartySet at, Prot p = clear_prot()) {
  return located(VInt{v, p, 0}, std::move(at));
}

// random located value over {A,B}, every node located at `at` or a subset
ValP gen_value(std::mt19937_64 &rng, int depth, const PartySet &at) {
  auto sub = [&](const PartySet &s) {
    if (s.size() == 2 && rng() % 3 == 0) return rng() % 2 ? A : B;
    return s;
  };
  if (depth == 0 || rng() % 3 == 0) {
    Prot p = rng() % 2 ? clear_prot() : enc_prot(at);
    return vint(static_cast<int64_t>(rng() % 100), sub(at), p);
  }
  switch (rng() % 3) {
    case 0:
      return located(VPair{gen_value(rng, depth - 1, at), gen_value(rng, depth - 1, at)},
                     sub(at));
    case 1:
      return located(VInj{static_cast<int>(rng() % 2) + 1, gen_value(rng, depth - 1, at)},
                     sub(at));
    default:
      return located(VPSet{rng() % 2 ? A : AB}, sub(at));
  }
}

}  // namespace

TEST_CASE("relocation degrades components outside the target") {
  ValP v = located(VPair{vint(2, AB), vint(3, A)}, AB);
  ValP r = relocate(v, B);
  REQUIRE_FALSE(r->star);
  CHECK(r->at == B);
  const VPair &pr = std::get<VPair>(r->u);
  CHECK(pr.first->at == B);
  CHECK(std::get<VInt>(pr.first->u).v == 2);
  CHECK(pr.second->star);
  CHECK(render_value(r) == "(2@{B}, *)@{B}");
}

TEST_CASE("relocating * stays *") {
  CHECK(relocate(star_value(), A)->star);
}

TEST_CASE("protocol compatibility") {
  CHECK(compatible(clear_prot(), A));
  CHECK(compatible(clear_prot(), AB));
  CHECK(compatible(enc_prot(AB), AB));
  CHECK_FALSE(compatible(enc_prot(AB), A));
  CHECK_FALSE(compatible(enc_prot(A), AB));
}

TEST_CASE("slicing a located value to one party") {
  ValP enc = vint(5, AB, enc_prot(AB));
  LValP la = slice_value(enc, "A");
  REQUIRE_FALSE(la->star);
  const LInt &li = std::get<LInt>(la->u);
  CHECK(li.v == 5);
  CHECK(li.prot == enc_prot(AB));
  CHECK(render_lval(la) == "5^enc#{A,B}");

  ValP pair = located(VPair{vint(1, A), vint(2, AB)}, AB);
  LValP lb = slice_value(pair, "B");
  const LPair &lp = std::get<LPair>(lb->u);
  CHECK(lp.first->star);
  CHECK(std::get<LInt>(lp.second->u).v == 2);
  CHECK(render_lval(lb) == "(*, 2)");

  // party outside the location sees *
  CHECK(slice_value(vint(1, A), "B")->star);
}

TEST_CASE("slicing and relocation cohere") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; i++) {
    ValP v = gen_value(rng, 3, AB);
    for (const PartyId &who : {std::string("A"), std::string("B")}) {
      PartySet m{who};
      // for A in m, the slice does not change under v ↓ m when A is in v's location
      if (!v->star && v->at.count(who)) {
        CHECK(lval_equal(slice_value(relocate(v, m), who), slice_value(v, who)));
      } else {
        CHECK(slice_value(v, who)->star);
      }
    }
  }
}

TEST_CASE("value equality and rendering") {
  ValP a = located(VInj{1, vint(0, A)}, A);
  ValP b = located(VInj{1, vint(0, A)}, A);
  ValP c = located(VInj{2, vint(0, A)}, A);
  CHECK(value_equal(a, b));
  CHECK_FALSE(value_equal(a, c));
  CHECK(render_value(a) == "inj1(0@{A})@{A}");
  CHECK(render_value(located(VPSet{AB}, A)) == "{A,B}@{A}");
  CHECK(render_value(star_value()) == "*");
}

TEST_CASE("lval equality ignores handles") {
  LValP a = mk_lval(LInt{9, enc_prot(AB), 17});
  LValP b = mk_lval(LInt{9, enc_prot(AB), 99});
  CHECK(lval_equal(a, b));
  CHECK_FALSE(lval_equal(a, mk_lval(LInt{8, enc_prot(AB), 17})));
  CHECK_FALSE(lval_equal(a, mk_lval(LInt{9, clear_prot(), 0})));
}

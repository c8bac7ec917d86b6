#pragma once

#include "lsym/syntax.hpp"

namespace lsym {

// Protocol tag: cleartext or encrypted (secret-shared) among an owner set.
struct Prot {
  PartySet enc;  // empty = clear; non-empty = enc#enc
  bool is_clear() const { return enc.empty(); }
  bool operator==(const Prot &o) const { return enc == o.enc; }
};

inline Prot clear_prot() { return Prot{}; }
inline Prot enc_prot(PartySet p) { return Prot{std::move(p)}; }

// ---- located values (ST semantics) ----

struct Value;
using ValP = std::shared_ptr<const Value>;

struct Env {
  std::map<std::string, ValP> m;
};

struct VInt { int64_t v = 0; Prot prot; uint64_t handle = 0; };
struct VPSet { PartySet p; };
struct VInj { int index = 1; ValP payload; };
struct VPair { ValP first, second; };
struct VClosure { std::shared_ptr<const AFun> fn; Env env; };
struct VRef { uint64_t loc = 0; PartySet creators; };

using LocValue = std::variant<VInt, VPSet, VInj, VPair, VClosure, VRef>;

struct Value {
  bool star = true;
  LocValue u;    // valid when !star
  PartySet at;   // location; valid when !star, non-empty
};

ValP star_value();
ValP located(LocValue u, PartySet at);

// ---- local values (DS semantics) ----

struct LVal;
using LValP = std::shared_ptr<const LVal>;

struct LEnv {
  std::map<std::string, LValP> m;
};

struct LInt { int64_t v = 0; Prot prot; uint64_t handle = 0; };
struct LPSet { PartySet p; };
struct LInj { int index = 1; LValP payload; };
struct LPair { LValP first, second; };
struct LClosure { std::shared_ptr<const AFun> fn; LEnv env; };
struct LRef { uint64_t loc = 0; PartySet creators; };

using LocalValue = std::variant<LInt, LPSet, LInj, LPair, LClosure, LRef>;

struct LVal {
  bool star = true;
  LocalValue u;  // valid when !star
};

LValP star_lval();
LValP mk_lval(LocalValue u);

using Store = std::map<uint64_t, ValP>;
using LStore = std::map<uint64_t, LValP>;

// v↓m: deep relocation.  Total; m must be non-empty.
ValP relocate(const ValP &v, const PartySet &m);
// ⊢_m ψ
bool compatible(const Prot &psi, const PartySet &m);
// v⟦A⟧: slice a located value to party A's local view.
LValP slice_value(const ValP &v, const PartyId &A);

bool value_equal(const ValP &a, const ValP &b);
bool lval_equal(const LValP &a, const LValP &b);

// Stable debug text.  Locations render as "loc<N>"; used by canonicalize
// with renamed identifiers and by the trace emitter raw.
std::string render_value(const ValP &v);
std::string render_lval(const LValP &v);
std::string render_prot(const Prot &p);

}  // namespace lsym

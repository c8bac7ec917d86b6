#pragma once

#include <random>

#include "lsym/values.hpp"

namespace lsym {

enum class Scheme { Xor, Additive };  // additive is mod 2^64

struct ShareBundle {
  uint64_t handle = 0;
  PartySet owners;
  Scheme scheme = Scheme::Additive;
  std::map<PartyId, uint64_t> shares;
};

ShareBundle split(uint64_t value, const PartySet &owners, Scheme scheme,
                  std::mt19937_64 &rng);
uint64_t combine(const ShareBundle &b);
ShareBundle reshare(const ShareBundle &b, const PartySet &new_owners,
                    std::mt19937_64 &rng);
// Local linear homomorphism: add under the additive scheme, xor under xor.
ShareBundle op_linear(BinOp op, const ShareBundle &a, const ShareBundle &b);

struct Dealer {
  std::mt19937_64 prg;
  struct Triple { uint64_t a, b, c; };
  std::vector<Triple> issued;

  explicit Dealer(uint64_t seed = 0) : prg(seed) {}
  // Beaver-style multiplication triple: c = a * b (mod 2^64 or xor-and).
  Triple triple(Scheme scheme);
};

// Ideal-functionality evaluation of a nonlinear op on bundles: combine,
// apply the clear ⟦⊙⟧ table, split freshly.
ShareBundle op_dealer(BinOp op, const ShareBundle &a, const ShareBundle &b,
                      Dealer &d, std::mt19937_64 &rng);
ShareBundle op_dealer_mux(const ShareBundle &c, const ShareBundle &t,
                          const ShareBundle &e, Dealer &d, std::mt19937_64 &rng);

// (Σ contributions) mod n — the seed-establishment rule.
int64_t sync_rand(const PartySet &P, const std::map<PartyId, int64_t> &contributions,
                  int64_t n);

// Shared random stream: established from per-party contributions, then
// extended by a common deterministic generator (splitmix64).
struct SyncRandStream {
  PartySet parties;
  uint64_t state = 0;

  static SyncRandStream establish(const PartySet &P,
                                  const std::map<PartyId, int64_t> &contributions);
  uint64_t next();
};

// Backs the concrete DS mode: a registry of live bundles plus the dealer.
// Deterministic given the seed and the order of operations.
class NetRuntime {
 public:
  explicit NetRuntime(uint64_t seed)
      : rng_(seed ^ 0x9e3779b97f4a7c15ULL), dealer_(seed) {}

  uint64_t do_split(int64_t value, const PartySet &owners);
  uint64_t do_reshare(uint64_t handle, const PartySet &new_owners);
  int64_t do_combine(uint64_t handle) const;
  // Cached per (op, h1, h2): the first party to evaluate the op creates the
  // result bundle; later parties pick up their own share of it.
  uint64_t do_binop(BinOp op, uint64_t h1, uint64_t h2);
  uint64_t do_mux(uint64_t hc, uint64_t ht, uint64_t he);
  int64_t share_of(uint64_t handle, const PartyId &A) const;
  const ShareBundle &bundle(uint64_t handle) const;

  Scheme scheme = Scheme::Additive;

 private:
  uint64_t register_bundle(ShareBundle b);

  std::mt19937_64 rng_;
  Dealer dealer_;
  std::map<uint64_t, ShareBundle> bundles_;
  std::map<std::string, uint64_t> op_cache_;
  uint64_t next_handle_ = 1;
};

}  // namespace lsym

#include "lsym/netshare.hpp"

#include <sstream>

namespace lsym {

namespace {

uint64_t splitmix64(uint64_t &state) {
  // Sebastiano Vigna's splitmix64 (public domain reference constants).
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t scheme_combine(Scheme s, uint64_t acc, uint64_t x) {
  return s == Scheme::Xor ? (acc ^ x) : (acc + x);
}

uint64_t scheme_uncombine(Scheme s, uint64_t target, uint64_t partial) {
  return s == Scheme::Xor ? (target ^ partial) : (target - partial);
}

}  // namespace

ShareBundle split(uint64_t value, const PartySet &owners, Scheme scheme,
                  std::mt19937_64 &rng) {
  if (owners.empty()) throw std::logic_error("split: empty owner set");
  ShareBundle b;
  b.owners = owners;
  b.scheme = scheme;
  uint64_t partial = 0;
  size_t i = 0;
  for (const auto &A : owners) {
    if (i + 1 == owners.size()) {
      b.shares[A] = scheme_uncombine(scheme, value, partial);
    } else {
      uint64_t s = rng();
      b.shares[A] = s;
      partial = scheme_combine(scheme, partial, s);
    }
    i++;
  }
  return b;
}

uint64_t combine(const ShareBundle &b) {
  if (b.shares.size() != b.owners.size())
    throw std::runtime_error("combine: bundle is missing owner shares");
  for (const auto &A : b.owners)
    if (!b.shares.count(A))
      throw std::runtime_error("combine: missing share for " + A);
  uint64_t acc = 0;
  for (const auto &[A, s] : b.shares) acc = scheme_combine(b.scheme, acc, s);
  return acc;
}

ShareBundle reshare(const ShareBundle &b, const PartySet &new_owners,
                    std::mt19937_64 &rng) {
  if (new_owners.empty()) throw std::logic_error("reshare: empty owner set");
  return split(combine(b), new_owners, b.scheme, rng);
}

ShareBundle op_linear(BinOp op, const ShareBundle &a, const ShareBundle &b) {
  if (a.owners != b.owners) throw std::runtime_error("op_linear: owner mismatch");
  if (a.scheme != b.scheme) throw std::runtime_error("op_linear: scheme mismatch");
  bool ok = ((op == BinOp::Add || op == BinOp::Sub) && a.scheme == Scheme::Additive) ||
            (op == BinOp::Xor && a.scheme == Scheme::Xor);
  if (!ok) throw std::runtime_error("op_linear: op is not linear under this scheme");
  ShareBundle out;
  out.owners = a.owners;
  out.scheme = a.scheme;
  for (const auto &A : a.owners)
    out.shares[A] = op == BinOp::Sub
                        ? a.shares.at(A) - b.shares.at(A)
                        : scheme_combine(a.scheme, a.shares.at(A), b.shares.at(A));
  return out;
}

Dealer::Triple Dealer::triple(Scheme scheme) {
  uint64_t a = prg(), b = prg();
  uint64_t c = scheme == Scheme::Xor ? (a & b) : (a * b);
  Triple t{a, b, c};
  issued.push_back(t);
  return t;
}

ShareBundle op_dealer(BinOp op, const ShareBundle &a, const ShareBundle &b,
                      Dealer &d, std::mt19937_64 &rng) {
  if (a.owners != b.owners) throw std::runtime_error("op_dealer: owner mismatch");
  if (a.scheme != b.scheme) throw std::runtime_error("op_dealer: scheme mismatch");
  (void)d;
  int64_t r = eval_int_binop(op, static_cast<int64_t>(combine(a)),
                             static_cast<int64_t>(combine(b)));
  return split(static_cast<uint64_t>(r), a.owners, a.scheme, rng);
}

ShareBundle op_dealer_mux(const ShareBundle &c, const ShareBundle &t,
                          const ShareBundle &e, Dealer &d, std::mt19937_64 &rng) {
  if (c.owners != t.owners || t.owners != e.owners)
    throw std::runtime_error("op_dealer_mux: owner mismatch");
  (void)d;
  int64_t r = eval_cond(static_cast<int64_t>(combine(c)),
                        static_cast<int64_t>(combine(t)),
                        static_cast<int64_t>(combine(e)));
  return split(static_cast<uint64_t>(r), c.owners, c.scheme, rng);
}

int64_t sync_rand(const PartySet &P, const std::map<PartyId, int64_t> &contributions,
                  int64_t n) {
  if (n <= 0) throw std::runtime_error("sync_rand: modulus must be positive");
  uint64_t sum = 0;
  for (const auto &A : P) {
    auto it = contributions.find(A);
    if (it == contributions.end())
      throw std::runtime_error("sync_rand: missing contribution for " + A);
    sum += static_cast<uint64_t>(it->second);
  }
  return static_cast<int64_t>(sum % static_cast<uint64_t>(n));
}

SyncRandStream SyncRandStream::establish(
    const PartySet &P, const std::map<PartyId, int64_t> &contributions) {
  SyncRandStream s;
  s.parties = P;
  uint64_t sum = 0;
  for (const auto &A : P) {
    auto it = contributions.find(A);
    if (it == contributions.end())
      throw std::runtime_error("SyncRandStream: missing contribution for " + A);
    sum += static_cast<uint64_t>(it->second);
  }
  s.state = sum;
  return s;
}

uint64_t SyncRandStream::next() { return splitmix64(state); }

uint64_t NetRuntime::register_bundle(ShareBundle b) {
  b.handle = next_handle_++;
  uint64_t h = b.handle;
  bundles_[h] = std::move(b);
  return h;
}

uint64_t NetRuntime::do_split(int64_t value, const PartySet &owners) {
  return register_bundle(split(static_cast<uint64_t>(value), owners, scheme, rng_));
}

uint64_t NetRuntime::do_reshare(uint64_t handle, const PartySet &new_owners) {
  return register_bundle(reshare(bundle(handle), new_owners, rng_));
}

int64_t NetRuntime::do_combine(uint64_t handle) const {
  return static_cast<int64_t>(combine(bundle(handle)));
}

uint64_t NetRuntime::do_binop(BinOp op, uint64_t h1, uint64_t h2) {
  std::ostringstream key;
  key << "b" << static_cast<int>(op) << "#" << h1 << "#" << h2;
  auto it = op_cache_.find(key.str());
  if (it != op_cache_.end()) return it->second;
  const ShareBundle &a = bundle(h1);
  const ShareBundle &b = bundle(h2);
  ShareBundle out;
  bool linear = ((op == BinOp::Add || op == BinOp::Sub) && a.scheme == Scheme::Additive) ||
                (op == BinOp::Xor && a.scheme == Scheme::Xor);
  if (linear) {
    out = op_linear(op, a, b);
  } else {
    out = op_dealer(op, a, b, dealer_, rng_);
  }
  uint64_t h = register_bundle(std::move(out));
  op_cache_[key.str()] = h;
  return h;
}

uint64_t NetRuntime::do_mux(uint64_t hc, uint64_t ht, uint64_t he) {
  std::ostringstream key;
  key << "m#" << hc << "#" << ht << "#" << he;
  auto it = op_cache_.find(key.str());
  if (it != op_cache_.end()) return it->second;
  uint64_t h = register_bundle(op_dealer_mux(bundle(hc), bundle(ht), bundle(he),
                                             dealer_, rng_));
  op_cache_[key.str()] = h;
  return h;
}

int64_t NetRuntime::share_of(uint64_t handle, const PartyId &A) const {
  const ShareBundle &b = bundle(handle);
  auto it = b.shares.find(A);
  if (it == b.shares.end())
    throw std::runtime_error("share_of: " + A + " does not own handle");
  return static_cast<int64_t>(it->second);
}

const ShareBundle &NetRuntime::bundle(uint64_t handle) const {
  auto it = bundles_.find(handle);
  if (it == bundles_.end()) throw std::runtime_error("unknown bundle handle");
  return it->second;
}

}  // namespace lsym

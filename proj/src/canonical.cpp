#include <algorithm>
#include <cctype>
#include <sstream>

#include "lsym/ds_eval.hpp"

namespace lsym {

namespace {

LEnv slice_env(const Env &env, const PartyId &A) {
  LEnv out;
  for (const auto &[k, v] : env.m) out.m[k] = slice_value(v, A);
  return out;
}

bool is_fresh_name(const std::string &x) {
  return !x.empty() && x[0] == '%';
}

// Renaming state for one local view: machine-generated variables and store
// locations get stable names in first-use order.
struct Canon {
  std::map<std::string, std::string> vren;
  std::map<uint64_t, std::string> lren;
  std::vector<uint64_t> lqueue;  // locations in discovery order
  size_t nv = 0, nl = 0;

  std::string var(const std::string &x) {
    auto it = vren.find(x);
    if (it != vren.end()) return it->second;
    std::string r = "$" + std::to_string(nv++);
    vren[x] = r;
    return r;
  }
  std::string loc(uint64_t l) {
    auto it = lren.find(l);
    if (it != lren.end()) return it->second;
    std::string r = "$loc" + std::to_string(nl++);
    lren[l] = r;
    lqueue.push_back(l);
    return r;
  }
  std::string name(const std::string &x) { return is_fresh_name(x) ? var(x) : x; }
  // renames "%N" tokens inside pretty-printed expression text
  std::string text(const std::string &s) {
    std::string out;
    size_t i = 0;
    while (i < s.size()) {
      if (s[i] == '%' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
        size_t j = i + 1;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) j++;
        out += var(s.substr(i, j - i));
        i = j;
      } else {
        out += s[i++];
      }
    }
    return out;
  }
};

// Plain names in lexicographic order first, then fresh names in the order
// they were renamed (names not yet seen sort by their numeric suffix).
template <typename EnvT>
std::vector<std::string> env_key_order(const Canon &cn, const EnvT &env) {
  std::vector<std::string> plain, fresh;
  for (const auto &[k, v] : env.m)
    (is_fresh_name(k) ? fresh : plain).push_back(k);
  auto rank = [&](const std::string &k) -> uint64_t {
    auto it = cn.vren.find(k);
    if (it != cn.vren.end()) return std::stoull(it->second.substr(1));
    return (1ULL << 40) + std::stoull(k.substr(1));
  };
  std::sort(fresh.begin(), fresh.end(),
            [&](const std::string &a, const std::string &b) { return rank(a) < rank(b); });
  plain.insert(plain.end(), fresh.begin(), fresh.end());
  return plain;
}

std::string lrender(Canon &cn, const LValP &v);
std::string vrender(Canon &cn, const ValP &v);

template <typename EnvT, typename RenderT>
std::string env_inline(Canon &cn, const EnvT &env, RenderT render) {
  std::ostringstream os;
  bool first = true;
  for (const auto &k : env_key_order(cn, env)) {
    if (!first) os << ", ";
    first = false;
    os << cn.name(k) << "=" << render(cn, env.m.at(k));
  }
  return os.str();
}

std::string lrender(Canon &cn, const LValP &v) {
  if (v->star) return "*";
  return std::visit(
      [&](const auto &n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LInt>) {
          std::string s = std::to_string(n.v);
          if (!n.prot.is_clear()) s += "^enc#" + pset_to_string(n.prot.enc);
          return s;
        } else if constexpr (std::is_same_v<T, LPSet>) {
          return pset_to_string(n.p);
        } else if constexpr (std::is_same_v<T, LInj>) {
          return "inj" + std::to_string(n.index) + "(" + lrender(cn, n.payload) + ")";
        } else if constexpr (std::is_same_v<T, LPair>) {
          return "(" + lrender(cn, n.first) + ", " + lrender(cn, n.second) + ")";
        } else if constexpr (std::is_same_v<T, LClosure>) {
          return "<fun [" + n.fn->self + "] " + n.fn->param + " -> " +
                 cn.text(pretty(n.fn->body)) + " | " +
                 env_inline(cn, n.env, [](Canon &c, const LValP &x) { return lrender(c, x); }) +
                 ">";
        } else {
          return cn.loc(n.loc) + "#" + pset_to_string(n.creators);
        }
      },
      v->u);
}

std::string vrender(Canon &cn, const ValP &v) {
  if (v->star) return "*";
  std::string body = std::visit(
      [&](const auto &n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VInt>) {
          std::string s = std::to_string(n.v);
          if (!n.prot.is_clear()) s += "^enc#" + pset_to_string(n.prot.enc);
          return s;
        } else if constexpr (std::is_same_v<T, VPSet>) {
          return pset_to_string(n.p);
        } else if constexpr (std::is_same_v<T, VInj>) {
          return "inj" + std::to_string(n.index) + "(" + vrender(cn, n.payload) + ")";
        } else if constexpr (std::is_same_v<T, VPair>) {
          return "(" + vrender(cn, n.first) + ", " + vrender(cn, n.second) + ")";
        } else if constexpr (std::is_same_v<T, VClosure>) {
          return "<fun [" + n.fn->self + "] " + n.fn->param + " -> " +
                 cn.text(pretty(n.fn->body)) + " | " +
                 env_inline(cn, n.env, [](Canon &c, const ValP &x) { return vrender(c, x); }) +
                 ">";
        } else {
          return cn.loc(n.loc) + "#" + pset_to_string(n.creators);
        }
      },
      v->u);
  return body + "@" + pset_to_string(v->at);
}

}  // namespace

DistConfig slice_config(const STConfig &st) {
  DistConfig C;
  for (const auto &A : st.mode) {
    LocalConfig c;
    c.self = A;
    c.mode = st.mode;
    c.env = slice_env(st.env, A);
    for (const auto &[l, v] : st.store) c.store[l] = slice_value(v, A);
    for (const auto &f : st.stack) {
      LFrame lf;
      lf.binder = f.binder;
      lf.body = f.body;
      lf.saved_mode = f.saved_mode;
      lf.saved_env = slice_env(f.saved_env, A);
      c.stack.push_back(std::move(lf));
    }
    c.expr = st.expr;
    c.next_loc = st.next_loc;
    c.next_fresh = st.next_fresh;
    C.parties[A] = std::move(c);
  }
  return C;
}

std::string canonicalize_local(const LocalConfig &c) {
  Canon cn;
  std::ostringstream os;
  os << "self " << c.self << "\n";
  os << "mode " << pset_to_string(c.mode) << "\n";
  os << "expr " << cn.text(pretty(c.expr)) << "\n";
  auto lr = [](Canon &x, const LValP &v) { return lrender(x, v); };
  for (auto it = c.stack.rbegin(); it != c.stack.rend(); ++it) {
    os << "frame " << cn.name(it->binder) << " mode " << pset_to_string(it->saved_mode)
       << " body " << cn.text(pretty(it->body)) << "\n";
    os << "fenv " << env_inline(cn, it->saved_env, lr) << "\n";
  }
  for (const auto &k : env_key_order(cn, c.env))
    os << "env " << cn.name(k) << " = " << lrender(cn, c.env.m.at(k)) << "\n";
  // reachable store only (GC): the queue grows while rendering
  for (size_t i = 0; i < cn.lqueue.size(); i++) {
    uint64_t l = cn.lqueue[i];
    auto it = c.store.find(l);
    os << "store " << cn.lren.at(l) << " = "
       << (it == c.store.end() ? std::string("<dangling>") : lrender(cn, it->second))
       << "\n";
  }
  return os.str();
}

std::string canonicalize_dist(const DistConfig &c) {
  std::ostringstream os;
  for (const auto &[A, lc] : c.parties)
    os << "== party " << A << " ==\n" << canonicalize_local(lc);
  return os.str();
}

std::string canonicalize_st(const STConfig &c) {
  Canon cn;
  std::ostringstream os;
  os << "mode " << pset_to_string(c.mode) << "\n";
  os << "expr " << cn.text(pretty(c.expr)) << "\n";
  auto vr = [](Canon &x, const ValP &v) { return vrender(x, v); };
  for (auto it = c.stack.rbegin(); it != c.stack.rend(); ++it) {
    os << "frame " << cn.name(it->binder) << " mode " << pset_to_string(it->saved_mode)
       << " body " << cn.text(pretty(it->body)) << "\n";
    os << "fenv " << env_inline(cn, it->saved_env, vr) << "\n";
  }
  for (const auto &k : env_key_order(cn, c.env))
    os << "env " << cn.name(k) << " = " << vrender(cn, c.env.m.at(k)) << "\n";
  for (size_t i = 0; i < cn.lqueue.size(); i++) {
    uint64_t l = cn.lqueue[i];
    auto it = c.store.find(l);
    os << "store " << cn.lren.at(l) << " = "
       << (it == c.store.end() ? std::string("<dangling>") : vrender(cn, it->second))
       << "\n";
  }
  return os.str();
}

}  // namespace lsym

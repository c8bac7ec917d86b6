#include "lsym/values.hpp"

#include <algorithm>
#include <sstream>

namespace lsym {

ValP star_value() {
  static ValP s = std::make_shared<const Value>();
  return s;
}

ValP located(LocValue u, PartySet at) {
  if (at.empty()) throw std::logic_error("located: empty location");
  auto v = std::make_shared<Value>();
  v->star = false;
  v->u = std::move(u);
  v->at = std::move(at);
  return v;
}

LValP star_lval() {
  static LValP s = std::make_shared<const LVal>();
  return s;
}

LValP mk_lval(LocalValue u) {
  auto v = std::make_shared<LVal>();
  v->star = false;
  v->u = std::move(u);
  return v;
}

bool compatible(const Prot &psi, const PartySet &m) {
  return psi.is_clear() || psi.enc == m;
}

static PartySet intersect(const PartySet &a, const PartySet &b) {
  PartySet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.begin()));
  return out;
}

ValP relocate(const ValP &v, const PartySet &m) {
  if (m.empty()) throw std::logic_error("relocate: empty mode");
  if (v->star) return v;
  PartySet at = intersect(v->at, m);
  if (at.empty()) return star_value();
  LocValue u = std::visit(
      [&](const auto &n) -> LocValue {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VInj>) {
          return VInj{n.index, relocate(n.payload, m)};
        } else if constexpr (std::is_same_v<T, VPair>) {
          return VPair{relocate(n.first, m), relocate(n.second, m)};
        } else if constexpr (std::is_same_v<T, VClosure>) {
          VClosure c{n.fn, {}};
          for (const auto &[k, val] : n.env.m) c.env.m[k] = relocate(val, m);
          return c;
        } else {
          return n;  // Int/PSet/Ref unchanged (tags kept)
        }
      },
      v->u);
  return located(std::move(u), std::move(at));
}

LValP slice_value(const ValP &v, const PartyId &A) {
  if (v->star) return star_lval();
  if (!v->at.count(A)) return star_lval();
  LocalValue u = std::visit(
      [&](const auto &n) -> LocalValue {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VInt>) {
          return LInt{n.v, n.prot, n.handle};
        } else if constexpr (std::is_same_v<T, VPSet>) {
          return LPSet{n.p};
        } else if constexpr (std::is_same_v<T, VInj>) {
          return LInj{n.index, slice_value(n.payload, A)};
        } else if constexpr (std::is_same_v<T, VPair>) {
          return LPair{slice_value(n.first, A), slice_value(n.second, A)};
        } else if constexpr (std::is_same_v<T, VClosure>) {
          LClosure c{n.fn, {}};
          for (const auto &[k, val] : n.env.m) c.env.m[k] = slice_value(val, A);
          return c;
        } else {
          return LRef{n.loc, n.creators};
        }
      },
      v->u);
  return mk_lval(std::move(u));
}

bool value_equal(const ValP &a, const ValP &b) {
  if (a->star || b->star) return a->star && b->star;
  if (a->at != b->at) return false;
  if (a->u.index() != b->u.index()) return false;
  return std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        const auto &y = std::get<T>(b->u);
        if constexpr (std::is_same_v<T, VInt>)
          return x.v == y.v && x.prot == y.prot;
        else if constexpr (std::is_same_v<T, VPSet>) return x.p == y.p;
        else if constexpr (std::is_same_v<T, VInj>)
          return x.index == y.index && value_equal(x.payload, y.payload);
        else if constexpr (std::is_same_v<T, VPair>)
          return value_equal(x.first, y.first) && value_equal(x.second, y.second);
        else if constexpr (std::is_same_v<T, VClosure>) {
          if (!atom_equal(Atom{*x.fn}, Atom{*y.fn})) return false;
          if (x.env.m.size() != y.env.m.size()) return false;
          auto i = x.env.m.begin();
          auto j = y.env.m.begin();
          for (; i != x.env.m.end(); ++i, ++j)
            if (i->first != j->first || !value_equal(i->second, j->second)) return false;
          return true;
        } else {
          return x.loc == y.loc && x.creators == y.creators;
        }
      },
      a->u);
}

bool lval_equal(const LValP &a, const LValP &b) {
  if (a->star || b->star) return a->star && b->star;
  if (a->u.index() != b->u.index()) return false;
  return std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        const auto &y = std::get<T>(b->u);
        if constexpr (std::is_same_v<T, LInt>)
          return x.v == y.v && x.prot == y.prot;
        else if constexpr (std::is_same_v<T, LPSet>) return x.p == y.p;
        else if constexpr (std::is_same_v<T, LInj>)
          return x.index == y.index && lval_equal(x.payload, y.payload);
        else if constexpr (std::is_same_v<T, LPair>)
          return lval_equal(x.first, y.first) && lval_equal(x.second, y.second);
        else if constexpr (std::is_same_v<T, LClosure>) {
          if (!atom_equal(Atom{*x.fn}, Atom{*y.fn})) return false;
          if (x.env.m.size() != y.env.m.size()) return false;
          auto i = x.env.m.begin();
          auto j = y.env.m.begin();
          for (; i != x.env.m.end(); ++i, ++j)
            if (i->first != j->first || !lval_equal(i->second, j->second)) return false;
          return true;
        } else {
          return x.loc == y.loc && x.creators == y.creators;
        }
      },
      a->u);
}

std::string render_prot(const Prot &p) {
  if (p.is_clear()) return "";
  return "^enc#" + pset_to_string(p.enc);
}

std::string render_value(const ValP &v) {
  if (v->star) return "*";
  std::ostringstream os;
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VInt>) os << n.v << render_prot(n.prot);
        else if constexpr (std::is_same_v<T, VPSet>) os << pset_to_string(n.p);
        else if constexpr (std::is_same_v<T, VInj>)
          os << "inj" << n.index << "(" << render_value(n.payload) << ")";
        else if constexpr (std::is_same_v<T, VPair>)
          os << "(" << render_value(n.first) << ", " << render_value(n.second) << ")";
        else if constexpr (std::is_same_v<T, VClosure>) {
          os << "<fun [" << n.fn->self << "] " << n.fn->param << " -> "
             << pretty(n.fn->body) << " | ";
          bool first = true;
          for (const auto &[k, val] : n.env.m) {
            if (!first) os << ", ";
            os << k << "=" << render_value(val);
            first = false;
          }
          os << ">";
        } else {
          os << "loc" << n.loc << "#" << pset_to_string(n.creators);
        }
      },
      v->u);
  os << "@" << pset_to_string(v->at);
  return os.str();
}

std::string render_lval(const LValP &v) {
  if (v->star) return "*";
  std::ostringstream os;
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LInt>) os << n.v << render_prot(n.prot);
        else if constexpr (std::is_same_v<T, LPSet>) os << pset_to_string(n.p);
        else if constexpr (std::is_same_v<T, LInj>)
          os << "inj" << n.index << "(" << render_lval(n.payload) << ")";
        else if constexpr (std::is_same_v<T, LPair>)
          os << "(" << render_lval(n.first) << ", " << render_lval(n.second) << ")";
        else if constexpr (std::is_same_v<T, LClosure>) {
          os << "<fun [" << n.fn->self << "] " << n.fn->param << " -> "
             << pretty(n.fn->body) << " | ";
          bool first = true;
          for (const auto &[k, val] : n.env.m) {
            if (!first) os << ", ";
            os << k << "=" << render_lval(val);
            first = false;
          }
          os << ">";
        } else {
          os << "loc" << n.loc << "#" << pset_to_string(n.creators);
        }
      },
      v->u);
  return os.str();
}

}  // namespace lsym

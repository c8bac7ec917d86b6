#include "lsym/syntax.hpp"

#include <sstream>

namespace lsym {

std::string pset_to_string(const PartySet &p) {
  std::string out = "{";
  bool first = true;
  for (const auto &x : p) {
    if (!first) out += ",";
    out += x;
    first = false;
  }
  out += "}";
  return out;
}

const char *binop_symbol(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Xor: return "^";
    case BinOp::Union: return "\\/";
  }
  return "?";
}

int64_t eval_int_binop(BinOp op, int64_t a, int64_t b) {
  uint64_t ua = static_cast<uint64_t>(a), ub = static_cast<uint64_t>(b);
  switch (op) {
    case BinOp::Add: return static_cast<int64_t>(ua + ub);
    case BinOp::Sub: return static_cast<int64_t>(ua - ub);
    case BinOp::Mul: return static_cast<int64_t>(ua * ub);
    case BinOp::Mod: return b == 0 ? a : a % b;  // total: x % 0 == x
    case BinOp::Eq: return a == b ? 1 : 0;
    case BinOp::Lt: return a < b ? 1 : 0;
    case BinOp::Le: return a <= b ? 1 : 0;
    case BinOp::Ge: return a >= b ? 1 : 0;
    case BinOp::And: return (a != 0 && b != 0) ? 1 : 0;
    case BinOp::Or: return (a != 0 || b != 0) ? 1 : 0;
    case BinOp::Xor: return static_cast<int64_t>(ua ^ ub);
    case BinOp::Union: throw std::logic_error("eval_int_binop: union");
  }
  throw std::logic_error("eval_int_binop: bad op");
}

int64_t eval_cond(int64_t c, int64_t t, int64_t e) { return c != 0 ? t : e; }

ExprPtr mk_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
ExprPtr mk_atom(Atom a) { return mk_expr(Expr{EAtom{std::move(a)}}); }

namespace {

void fv_atom(const Atom &a, std::set<std::string> &bound, std::set<std::string> &out);
void fv_expr(const ExprPtr &e, std::set<std::string> &bound, std::set<std::string> &out);

void use(const std::string &x, const std::set<std::string> &bound,
         std::set<std::string> &out) {
  if (!bound.count(x)) out.insert(x);
}

void fv_atom(const Atom &a, std::set<std::string> &bound, std::set<std::string> &out) {
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AVar>) {
          use(n.name, bound, out);
        } else if constexpr (std::is_same_v<T, ABinOp>) {
          use(n.lhs, bound, out);
          use(n.rhs, bound, out);
        } else if constexpr (std::is_same_v<T, AMux>) {
          use(n.cond, bound, out);
          use(n.on_true, bound, out);
          use(n.on_false, bound, out);
        } else if constexpr (std::is_same_v<T, AInj>) {
          use(n.payload, bound, out);
        } else if constexpr (std::is_same_v<T, APair>) {
          use(n.first, bound, out);
          use(n.second, bound, out);
        } else if constexpr (std::is_same_v<T, AProj>) {
          use(n.payload, bound, out);
        } else if constexpr (std::is_same_v<T, AFun>) {
          bool had_self = bound.count(n.self) > 0;
          bool had_param = bound.count(n.param) > 0;
          bound.insert(n.self);
          bound.insert(n.param);
          fv_expr(n.body, bound, out);
          if (!had_self) bound.erase(n.self);
          if (!had_param && n.param != n.self) bound.erase(n.param);
        } else if constexpr (std::is_same_v<T, ARef>) {
          use(n.init, bound, out);
        } else if constexpr (std::is_same_v<T, ADeref>) {
          use(n.ref, bound, out);
        } else if constexpr (std::is_same_v<T, AAssign>) {
          use(n.ref, bound, out);
          use(n.value, bound, out);
        } else if constexpr (std::is_same_v<T, AWrite>) {
          use(n.value, bound, out);
        } else if constexpr (std::is_same_v<T, AShare> ||
                             std::is_same_v<T, AReveal>) {
          use(n.src, bound, out);
          use(n.dst, bound, out);
          use(n.payload, bound, out);
        }
      },
      a);
}

template <class F>
void with_bound(std::set<std::string> &bound, const std::string &x, F f) {
  bool had = bound.count(x) > 0;
  bound.insert(x);
  f();
  if (!had) bound.erase(x);
}

void fv_expr(const ExprPtr &e, std::set<std::string> &bound, std::set<std::string> &out) {
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EAtom>) {
          fv_atom(n.atom, bound, out);
        } else if constexpr (std::is_same_v<T, ECaseSum>) {
          use(n.subject, bound, out);
          with_bound(bound, n.binder1, [&] { fv_expr(n.branch1, bound, out); });
          with_bound(bound, n.binder2, [&] { fv_expr(n.branch2, bound, out); });
        } else if constexpr (std::is_same_v<T, ECasePSet>) {
          use(n.subject, bound, out);
          fv_expr(n.on_empty, bound, out);
          with_bound(bound, n.head_binder, [&] {
            with_bound(bound, n.tail_binder,
                       [&] { fv_expr(n.on_cons, bound, out); });
          });
        } else if constexpr (std::is_same_v<T, EApp>) {
          use(n.fn, bound, out);
          use(n.arg, bound, out);
        } else if constexpr (std::is_same_v<T, EPar>) {
          use(n.pset, bound, out);
          fv_expr(n.body, bound, out);
        } else if constexpr (std::is_same_v<T, ELet>) {
          fv_expr(n.bound, bound, out);
          with_bound(bound, n.binder, [&] { fv_expr(n.body, bound, out); });
        } else if constexpr (std::is_same_v<T, EIf>) {
          use(n.cond, bound, out);
          fv_expr(n.on_true, bound, out);
          fv_expr(n.on_false, bound, out);
        }
      },
      e->node);
}

}  // namespace

std::set<std::string> free_vars(const ExprPtr &e) {
  std::set<std::string> bound, out;
  fv_expr(e, bound, out);
  return out;
}

std::set<std::string> free_vars_atom(const Atom &a) {
  std::set<std::string> bound, out;
  fv_atom(a, bound, out);
  return out;
}

bool atom_equal(const Atom &a, const Atom &b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        const auto &y = std::get<T>(b);
        if constexpr (std::is_same_v<T, AVar>) return x.name == y.name;
        else if constexpr (std::is_same_v<T, ALit>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, APSetLit>) return x.parties == y.parties;
        else if constexpr (std::is_same_v<T, ABinOp>)
          return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
        else if constexpr (std::is_same_v<T, AMux>)
          return x.cond == y.cond && x.on_true == y.on_true && x.on_false == y.on_false;
        else if constexpr (std::is_same_v<T, AInj>)
          return x.index == y.index && x.payload == y.payload;
        else if constexpr (std::is_same_v<T, APair>)
          return x.first == y.first && x.second == y.second;
        else if constexpr (std::is_same_v<T, AProj>)
          return x.index == y.index && x.payload == y.payload;
        else if constexpr (std::is_same_v<T, AFun>)
          return x.self == y.self && x.param == y.param && expr_equal(x.body, y.body);
        else if constexpr (std::is_same_v<T, ARef>) return x.init == y.init;
        else if constexpr (std::is_same_v<T, ADeref>) return x.ref == y.ref;
        else if constexpr (std::is_same_v<T, AAssign>)
          return x.ref == y.ref && x.value == y.value;
        else if constexpr (std::is_same_v<T, ARead>) return true;
        else if constexpr (std::is_same_v<T, AWrite>) return x.value == y.value;
        else
          return x.src == y.src && x.dst == y.dst && x.payload == y.payload;
      },
      a);
}

bool expr_equal(const ExprPtr &a, const ExprPtr &b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        const auto &y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, EAtom>) return atom_equal(x.atom, y.atom);
        else if constexpr (std::is_same_v<T, ECaseSum>)
          return x.subject == y.subject && x.binder1 == y.binder1 &&
                 x.binder2 == y.binder2 && expr_equal(x.branch1, y.branch1) &&
                 expr_equal(x.branch2, y.branch2);
        else if constexpr (std::is_same_v<T, ECasePSet>)
          return x.subject == y.subject && x.head_binder == y.head_binder &&
                 x.tail_binder == y.tail_binder &&
                 expr_equal(x.on_empty, y.on_empty) &&
                 expr_equal(x.on_cons, y.on_cons);
        else if constexpr (std::is_same_v<T, EApp>)
          return x.fn == y.fn && x.arg == y.arg;
        else if constexpr (std::is_same_v<T, EPar>)
          return x.pset == y.pset && expr_equal(x.body, y.body);
        else if constexpr (std::is_same_v<T, ELet>)
          return x.binder == y.binder && expr_equal(x.bound, y.bound) &&
                 expr_equal(x.body, y.body);
        else
          return x.cond == y.cond && expr_equal(x.on_true, y.on_true) &&
                 expr_equal(x.on_false, y.on_false);
      },
      a->node);
}

namespace {

struct AlphaCtx {
  std::map<std::string, std::string> l2r, r2l;
};

bool alpha_var(const std::string &x, const std::string &y, const AlphaCtx &ctx) {
  auto i = ctx.l2r.find(x);
  auto j = ctx.r2l.find(y);
  if (i != ctx.l2r.end() || j != ctx.r2l.end())
    return i != ctx.l2r.end() && j != ctx.r2l.end() && i->second == y && j->second == x;
  return x == y;  // both free
}

AlphaCtx bind(AlphaCtx ctx, const std::string &x, const std::string &y) {
  ctx.l2r[x] = y;
  ctx.r2l[y] = x;
  return ctx;
}

bool alpha_expr(const ExprPtr &a, const ExprPtr &b, const AlphaCtx &ctx);

bool alpha_atom(const Atom &a, const Atom &b, const AlphaCtx &ctx) {
  if (a.index() != b.index()) return false;
  auto v = [&](const std::string &x, const std::string &y) {
    return alpha_var(x, y, ctx);
  };
  return std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        const auto &y = std::get<T>(b);
        if constexpr (std::is_same_v<T, AVar>) return v(x.name, y.name);
        else if constexpr (std::is_same_v<T, ALit>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, APSetLit>) return x.parties == y.parties;
        else if constexpr (std::is_same_v<T, ABinOp>)
          return x.op == y.op && v(x.lhs, y.lhs) && v(x.rhs, y.rhs);
        else if constexpr (std::is_same_v<T, AMux>)
          return v(x.cond, y.cond) && v(x.on_true, y.on_true) && v(x.on_false, y.on_false);
        else if constexpr (std::is_same_v<T, AInj>)
          return x.index == y.index && v(x.payload, y.payload);
        else if constexpr (std::is_same_v<T, APair>)
          return v(x.first, y.first) && v(x.second, y.second);
        else if constexpr (std::is_same_v<T, AProj>)
          return x.index == y.index && v(x.payload, y.payload);
        else if constexpr (std::is_same_v<T, AFun>) {
          auto c = bind(bind(ctx, x.self, y.self), x.param, y.param);
          return alpha_expr(x.body, y.body, c);
        } else if constexpr (std::is_same_v<T, ARef>) return v(x.init, y.init);
        else if constexpr (std::is_same_v<T, ADeref>) return v(x.ref, y.ref);
        else if constexpr (std::is_same_v<T, AAssign>)
          return v(x.ref, y.ref) && v(x.value, y.value);
        else if constexpr (std::is_same_v<T, ARead>) return true;
        else if constexpr (std::is_same_v<T, AWrite>) return v(x.value, y.value);
        else
          return v(x.src, y.src) && v(x.dst, y.dst) && v(x.payload, y.payload);
      },
      a);
}

bool alpha_expr(const ExprPtr &a, const ExprPtr &b, const AlphaCtx &ctx) {
  if (a->node.index() != b->node.index()) return false;
  auto v = [&](const std::string &x, const std::string &y) {
    return alpha_var(x, y, ctx);
  };
  return std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        const auto &y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, EAtom>) return alpha_atom(x.atom, y.atom, ctx);
        else if constexpr (std::is_same_v<T, ECaseSum>)
          return v(x.subject, y.subject) &&
                 alpha_expr(x.branch1, y.branch1, bind(ctx, x.binder1, y.binder1)) &&
                 alpha_expr(x.branch2, y.branch2, bind(ctx, x.binder2, y.binder2));
        else if constexpr (std::is_same_v<T, ECasePSet>)
          return v(x.subject, y.subject) && alpha_expr(x.on_empty, y.on_empty, ctx) &&
                 alpha_expr(x.on_cons, y.on_cons,
                            bind(bind(ctx, x.head_binder, y.head_binder),
                                 x.tail_binder, y.tail_binder));
        else if constexpr (std::is_same_v<T, EApp>)
          return v(x.fn, y.fn) && v(x.arg, y.arg);
        else if constexpr (std::is_same_v<T, EPar>)
          return v(x.pset, y.pset) && alpha_expr(x.body, y.body, ctx);
        else if constexpr (std::is_same_v<T, ELet>)
          return alpha_expr(x.bound, y.bound, ctx) &&
                 alpha_expr(x.body, y.body, bind(ctx, x.binder, y.binder));
        else
          return v(x.cond, y.cond) && alpha_expr(x.on_true, y.on_true, ctx) &&
                 alpha_expr(x.on_false, y.on_false, ctx);
      },
      a->node);
}

}  // namespace

bool alpha_equal(const ExprPtr &a, const ExprPtr &b) {
  return alpha_expr(a, b, AlphaCtx{});
}

std::string atom_head(const Atom &a) {
  return std::visit(
      [&](const auto &n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AVar>) return "var " + n.name;
        else if constexpr (std::is_same_v<T, ALit>) return "lit " + std::to_string(n.value);
        else if constexpr (std::is_same_v<T, APSetLit>) return "pset " + pset_to_string(n.parties);
        else if constexpr (std::is_same_v<T, ABinOp>) return std::string("binop ") + binop_symbol(n.op);
        else if constexpr (std::is_same_v<T, AMux>) return "mux";
        else if constexpr (std::is_same_v<T, AInj>) return "inj" + std::to_string(n.index);
        else if constexpr (std::is_same_v<T, APair>) return "pair";
        else if constexpr (std::is_same_v<T, AProj>) return "proj" + std::to_string(n.index);
        else if constexpr (std::is_same_v<T, AFun>) return "fun";
        else if constexpr (std::is_same_v<T, ARef>) return "ref";
        else if constexpr (std::is_same_v<T, ADeref>) return "deref";
        else if constexpr (std::is_same_v<T, AAssign>) return "assign";
        else if constexpr (std::is_same_v<T, ARead>) return "read";
        else if constexpr (std::is_same_v<T, AWrite>) return "write";
        else if constexpr (std::is_same_v<T, AShare>) return "share";
        else return "reveal";
      },
      a);
}

std::string expr_head(const ExprPtr &e) {
  return std::visit(
      [&](const auto &n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EAtom>) return atom_head(n.atom);
        else if constexpr (std::is_same_v<T, ECaseSum>) return "case-sum " + n.subject;
        else if constexpr (std::is_same_v<T, ECasePSet>) return "case-pset " + n.subject;
        else if constexpr (std::is_same_v<T, EApp>) return "app " + n.fn + " " + n.arg;
        else if constexpr (std::is_same_v<T, EPar>) return "par " + n.pset;
        else if constexpr (std::is_same_v<T, ELet>) return "let " + n.binder;
        else return "if " + n.cond;
      },
      e->node);
}

namespace {

void check_expr(const ExprPtr &e, std::set<std::string> &scope,
                const PartySet &principals);

void fail_check(const std::string &msg) { throw std::runtime_error("core invariant: " + msg); }

void check_var(const std::string &x, const std::set<std::string> &scope) {
  if (x.empty()) fail_check("empty variable name");
  if (!scope.count(x)) fail_check("unbound variable " + x);
}

void check_atom(const Atom &a, std::set<std::string> &scope, const PartySet &principals) {
  for (const auto &x : free_vars_atom(a)) check_var(x, scope);
  if (auto *p = std::get_if<APSetLit>(&a)) {
    for (const auto &m : p->parties)
      if (!principals.count(m)) fail_check("undeclared party " + m);
  }
  if (auto *i = std::get_if<AInj>(&a)) {
    if (i->index != 1 && i->index != 2) fail_check("inj index");
  }
  if (auto *p = std::get_if<AProj>(&a)) {
    if (p->index != 1 && p->index != 2) fail_check("proj index");
  }
  if (auto *f = std::get_if<AFun>(&a)) {
    std::set<std::string> inner = scope;
    inner.insert(f->self);
    inner.insert(f->param);
    check_expr(f->body, inner, principals);
  }
}

void check_expr(const ExprPtr &e, std::set<std::string> &scope,
                const PartySet &principals) {
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EAtom>) {
          check_atom(n.atom, scope, principals);
        } else if constexpr (std::is_same_v<T, ECaseSum>) {
          check_var(n.subject, scope);
          auto s1 = scope; s1.insert(n.binder1);
          check_expr(n.branch1, s1, principals);
          auto s2 = scope; s2.insert(n.binder2);
          check_expr(n.branch2, s2, principals);
        } else if constexpr (std::is_same_v<T, ECasePSet>) {
          check_var(n.subject, scope);
          check_expr(n.on_empty, scope, principals);
          if (n.head_binder == n.tail_binder) fail_check("duplicate case binders");
          auto s = scope;
          s.insert(n.head_binder);
          s.insert(n.tail_binder);
          check_expr(n.on_cons, s, principals);
        } else if constexpr (std::is_same_v<T, EApp>) {
          check_var(n.fn, scope);
          check_var(n.arg, scope);
        } else if constexpr (std::is_same_v<T, EPar>) {
          check_var(n.pset, scope);
          check_expr(n.body, scope, principals);
        } else if constexpr (std::is_same_v<T, ELet>) {
          check_expr(n.bound, scope, principals);
          auto s = scope; s.insert(n.binder);
          check_expr(n.body, s, principals);
        } else if constexpr (std::is_same_v<T, EIf>) {
          check_var(n.cond, scope);
          check_expr(n.on_true, scope, principals);
          check_expr(n.on_false, scope, principals);
        }
      },
      e->node);
}

}  // namespace

void check_core_invariants(const ExprPtr &e, const PartySet &principals) {
  std::set<std::string> scope;
  check_expr(e, scope, principals);
}

}  // namespace lsym

#include <functional>

#include "lsym/surface.hpp"
#include "lsym/syntax.hpp"

namespace lsym {

namespace {

struct Lowerer {
  PartySet principals;
  int next_temp = 0;

  std::string fresh(const char *stem) {
    return std::string("_") + stem + std::to_string(next_temp++);
  }

  [[noreturn]] void fail(const SurfaceExpr &s, const std::string &msg) {
    throw ParseError(msg, s.line, s.col);
  }

  using Cont = std::function<ExprPtr(const std::string &)>;

  ExprPtr let_in(const std::string &x, ExprPtr bound, ExprPtr body) {
    return mk_expr(Expr{ELet{x, std::move(bound), std::move(body)}});
  }

  // Lower s and hand its result to k as a variable.
  ExprPtr atomize(const SExprPtr &s, const Cont &k) {
    if (s->kind == SurfaceExpr::Var) return k(s->name);
    std::string t = fresh("t");
    return let_in(t, lower(s), k(t));
  }

  ExprPtr atomize2(const SExprPtr &a, const SExprPtr &b,
                   const std::function<ExprPtr(const std::string &, const std::string &)> &k) {
    return atomize(a, [&](const std::string &x) {
      return atomize(b, [&](const std::string &y) { return k(x, y); });
    });
  }

  // [e1, ..., en] desugars to inj2 (e1, [rest]); [] to inj1 0.
  ExprPtr lower_list_from(const std::vector<SExprPtr> &items, size_t i) {
    if (i == items.size()) {
      std::string z = fresh("t");
      return let_in(z, mk_atom(Atom{ALit{0}}), mk_atom(Atom{AInj{1, z}}));
    }
    return atomize(items[i], [&](const std::string &hd) {
      std::string rest = fresh("t");
      std::string pair = fresh("t");
      return let_in(rest, lower_list_from(items, i + 1),
                    let_in(pair, mk_atom(Atom{APair{hd, rest}}),
                           mk_atom(Atom{AInj{2, pair}})));
    });
  }

  ExprPtr lower_pset(const SurfaceExpr &s) {
    PartySet lits;
    std::vector<std::string> vars;
    for (const auto &m : s.members) {
      if (principals.count(m)) lits.insert(m);
      else vars.push_back(m);
    }
    if (vars.empty()) return mk_atom(Atom{APSetLit{lits}});
    if (lits.empty() && vars.size() == 1) return mk_atom(Atom{AVar{vars[0]}});
    // union chain: literal part (if any) then the variables
    std::function<ExprPtr(const std::string &, size_t)> chain =
        [&](const std::string &acc, size_t i) -> ExprPtr {
      if (i == vars.size()) return mk_atom(Atom{AVar{acc}});
      std::string t = fresh("t");
      return let_in(t, mk_atom(Atom{ABinOp{BinOp::Union, acc, vars[i]}}),
                    chain(t, i + 1));
    };
    if (lits.empty()) return chain(vars[0], 1);
    std::string t = fresh("t");
    return let_in(t, mk_atom(Atom{APSetLit{lits}}), chain(t, 0));
  }

  ExprPtr lower(const SExprPtr &s) {
    switch (s->kind) {
      case SurfaceExpr::Var:
        return mk_atom(Atom{AVar{s->name}});
      case SurfaceExpr::Int:
        return mk_atom(Atom{ALit{s->value}});
      case SurfaceExpr::PSet:
        return lower_pset(*s);
      case SurfaceExpr::List:
        return lower_list_from(s->items, 0);
      case SurfaceExpr::PairK:
        return atomize2(s->a, s->b, [&](const std::string &x, const std::string &y) {
          return mk_atom(Atom{APair{x, y}});
        });
      case SurfaceExpr::BinOpK:
        return atomize2(s->a, s->b, [&](const std::string &x, const std::string &y) {
          return mk_atom(Atom{ABinOp{s->op, x, y}});
        });
      case SurfaceExpr::MuxK:
        return atomize(s->a, [&](const std::string &c) {
          return atomize2(s->b, s->c, [&](const std::string &t, const std::string &e) {
            return mk_atom(Atom{AMux{c, t, e}});
          });
        });
      case SurfaceExpr::IfK:
        return atomize(s->a, [&](const std::string &c) {
          return mk_expr(Expr{EIf{c, lower(s->b), lower(s->c)}});
        });
      case SurfaceExpr::LetK:
        return let_in(s->binder1, lower(s->a), lower(s->b));
      case SurfaceExpr::ParK:
        return atomize(s->a, [&](const std::string &p) {
          return mk_expr(Expr{EPar{p, lower(s->b)}});
        });
      case SurfaceExpr::FunK: {
        ExprPtr body = lower(s->a);
        for (size_t i = s->params.size(); i-- > 0;) {
          std::string self = (i == 0 && !s->name.empty()) ? s->name : fresh("s");
          body = mk_atom(Atom{AFun{self, s->params[i], body}});
        }
        return body;
      }
      case SurfaceExpr::AppK:
        return atomize2(s->a, s->b, [&](const std::string &f, const std::string &x) {
          return mk_expr(Expr{EApp{f, x}});
        });
      case SurfaceExpr::CaseSumK:
        return atomize(s->a, [&](const std::string &subj) {
          return mk_expr(Expr{ECaseSum{subj, s->binder1, lower(s->b),
                                       s->binder2, lower(s->c)}});
        });
      case SurfaceExpr::CasePSetK:
        return atomize(s->a, [&](const std::string &subj) {
          return mk_expr(Expr{ECasePSet{subj, lower(s->b), s->binder1,
                                        s->binder2, lower(s->c)}});
        });
      case SurfaceExpr::InjK:
        return atomize(s->a, [&](const std::string &x) {
          return mk_atom(Atom{AInj{static_cast<int>(s->value), x}});
        });
      case SurfaceExpr::ProjK:
        return atomize(s->a, [&](const std::string &x) {
          return mk_atom(Atom{AProj{static_cast<int>(s->value), x}});
        });
      case SurfaceExpr::RefK:
        return atomize(s->a, [&](const std::string &x) { return mk_atom(Atom{ARef{x}}); });
      case SurfaceExpr::DerefK:
        return atomize(s->a, [&](const std::string &x) { return mk_atom(Atom{ADeref{x}}); });
      case SurfaceExpr::AssignK:
        return atomize2(s->a, s->b, [&](const std::string &r, const std::string &v) {
          return mk_atom(Atom{AAssign{r, v}});
        });
      case SurfaceExpr::ReadK:
        return mk_atom(Atom{ARead{}});
      case SurfaceExpr::WriteK:
        return atomize(s->a, [&](const std::string &x) { return mk_atom(Atom{AWrite{x}}); });
      case SurfaceExpr::ShareK:
      case SurfaceExpr::RevealK: {
        bool is_share = s->kind == SurfaceExpr::ShareK;
        return atomize2(s->a, s->b, [&](const std::string &p, const std::string &q) {
          return atomize(s->c, [&](const std::string &v) {
            if (is_share) return mk_atom(Atom{AShare{p, q, v}});
            return mk_atom(Atom{AReveal{p, q, v}});
          });
        });
      }
    }
    throw std::logic_error("lower: bad surface node");
  }

  // A def becomes a (possibly curried) recursive lambda or a plain value.
  ExprPtr lower_def(const SurfaceDef &d) {
    std::vector<std::vector<std::string>> params = d.params;
    if (d.brec) params.insert(params.begin(), {d.name});
    if (params.empty()) return lower(d.body);
    // tuple/unit patterns: bind components off a fresh parameter
    ExprPtr body = lower(d.body);
    std::vector<std::string> names(params.size());
    for (size_t i = params.size(); i-- > 0;) {
      if (params[i].size() == 1) {
        names[i] = params[i][0];
        continue;
      }
      if (params[i].empty()) {  // unit pattern "()"
        names[i] = fresh("u");
        continue;
      }
      // tuple pattern via fst/snd chains: (a, b, c) == (a, (b, c))
      names[i] = fresh("p");
      std::vector<std::pair<std::string, Atom>> binds;
      std::string cur = names[i];
      size_t n = params[i].size();
      for (size_t j = 0; j < n; j++) {
        if (j + 1 == n) {
          binds.emplace_back(params[i][j], Atom{AProj{2, cur}});
        } else {
          binds.emplace_back(params[i][j], Atom{AProj{1, cur}});
          if (j + 2 < n) {
            std::string rest = fresh("p");
            binds.emplace_back(rest, Atom{AProj{2, cur}});
            cur = rest;
          }
        }
      }
      for (size_t k = binds.size(); k-- > 0;)
        body = let_in(binds[k].first, mk_atom(binds[k].second), body);
    }
    for (size_t i = params.size(); i-- > 0;) {
      std::string self = i == 0 ? d.name : fresh("s");
      body = mk_atom(Atom{AFun{self, names[i], body}});
    }
    return body;
  }
};

void scan_idents(const SExprPtr &s, std::set<std::string> &out) {
  if (!s) return;
  if (s->kind == SurfaceExpr::Var) out.insert(s->name);
  if (s->kind == SurfaceExpr::PSet)
    for (const auto &m : s->members) out.insert(m);
  for (const auto &it : s->items) scan_idents(it, out);
  scan_idents(s->a, out);
  scan_idents(s->b, out);
  scan_idents(s->c, out);
}

}  // namespace

ExprPtr lower(const Program &p) {
  if (p.principals.empty())
    throw ParseError("no principals declared", 1, 1);
  Lowerer lw;
  for (const auto &pr : p.principals) {
    if (lw.principals.count(pr))
      throw ParseError("duplicate principal " + pr, 1, 1);
    lw.principals.insert(pr);
  }

  std::map<std::string, const SurfaceDef *> by_name;
  const SurfaceDef *main_def = nullptr;
  for (const auto &d : p.defs) {
    if (by_name.count(d->name))
      throw ParseError("duplicate definition " + d->name, d->line, d->col);
    by_name[d->name] = d.get();
    if (d->name == "main") main_def = d.get();
  }
  if (!main_def) throw ParseError("no main definition", 1, 1);
  bool main_ok = main_def->params.empty() ||
                 (main_def->params.size() == 1 && main_def->params[0].empty());
  if (!main_ok)
    throw ParseError("main takes no arguments", main_def->line, main_def->col);

  // keep only definitions transitively referenced from main
  std::set<std::string> needed{"main"};
  std::vector<std::string> work{"main"};
  while (!work.empty()) {
    auto cur = work.back();
    work.pop_back();
    std::set<std::string> ids;
    scan_idents(by_name[cur]->body, ids);
    for (const auto &id : ids) {
      if (by_name.count(id) && !needed.count(id)) {
        needed.insert(id);
        work.push_back(id);
      }
    }
  }

  ExprPtr expr = lw.lower(main_def->body);
  for (auto it = p.defs.rbegin(); it != p.defs.rend(); ++it) {
    const auto &d = *it;
    if (d->name == "main" || !needed.count(d->name)) continue;
    expr = lw.let_in(d->name, lw.lower_def(*d), expr);
  }
  check_core_invariants(expr, lw.principals);
  return expr;
}

ExprPtr parse_and_lower(const std::string &text) { return lower(parse(text)); }

}  // namespace lsym

#include "lsym/ds_eval.hpp"

#include <algorithm>
#include <sstream>

namespace lsym {

namespace {

PartySet intersect(const PartySet &a, const PartySet &b) {
  PartySet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.begin()));
  return out;
}

PartySet set_union(const PartySet &a, const PartySet &b) {
  PartySet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

LAtomRes lstuck(const char *rule, const std::string &reason) {
  LAtomRes r;
  r.ok = false;
  r.stuck = StuckInfo{rule, reason};
  return r;
}

LAtomRes lokv(LValP v) {
  LAtomRes r;
  r.ok = true;
  r.v = std::move(v);
  return r;
}

bool llookup(const LocalConfig &cfg, const std::string &x, LValP &out,
             const char *rule, LAtomRes &err) {
  auto it = cfg.env.m.find(x);
  if (it == cfg.env.m.end()) {
    err = lstuck(rule, "unbound variable " + x);
    return false;
  }
  out = it->second;  // DS-Var: no relocation, ★ flows through introductions
  return true;
}

bool want_lint(const LValP &v, const char *rule, const std::string &what,
               int64_t &i, Prot &prot, uint64_t &handle, LAtomRes &err) {
  if (v->star) {
    err = lstuck(rule, what + " is *");
    return false;
  }
  const LInt *n = std::get_if<LInt>(&v->u);
  if (!n) {
    err = lstuck(rule, what + " is not an integer");
    return false;
  }
  i = n->v;
  prot = n->prot;
  handle = n->handle;
  return true;
}

bool want_lpset(const LValP &v, const char *rule, const std::string &what,
                PartySet &p, LAtomRes &err) {
  if (v->star) {
    err = lstuck(rule, what + " is *");
    return false;
  }
  const LPSet *n = std::get_if<LPSet>(&v->u);
  if (!n) {
    err = lstuck(rule, what + " is not a party set");
    return false;
  }
  p = n->p;
  return true;
}

}  // namespace

DistConfig ds_initial(ExprPtr program, const PartySet &principals) {
  if (principals.empty()) throw std::logic_error("ds_initial: no principals");
  DistConfig C;
  for (const auto &A : principals) {
    LocalConfig c;
    c.self = A;
    c.mode = principals;
    c.expr = program;
    C.parties[A] = std::move(c);
  }
  return C;
}

LAtomRes ds_atomic(LocalConfig &cfg, const Atom &a, InputOracle &io, NetRuntime *net) {
  const PartySet &m = cfg.mode;
  LAtomRes err;
  return std::visit(
      [&](const auto &n) -> LAtomRes {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AVar>) {
          LValP v;
          if (!llookup(cfg, n.name, v, "DS-Var", err)) return err;
          return lokv(v);
        } else if constexpr (std::is_same_v<T, ALit>) {
          return lokv(mk_lval(LInt{n.value, clear_prot()}));
        } else if constexpr (std::is_same_v<T, APSetLit>) {
          return lokv(mk_lval(LPSet{n.parties}));
        } else if constexpr (std::is_same_v<T, ABinOp>) {
          LValP v1, v2;
          if (!llookup(cfg, n.lhs, v1, "DS-BinOp", err)) return err;
          if (!llookup(cfg, n.rhs, v2, "DS-BinOp", err)) return err;
          if (n.op == BinOp::Union) {
            PartySet p1, p2;
            if (!want_lpset(v1, "DS-Pset-BinOp", "left operand", p1, err)) return err;
            if (!want_lpset(v2, "DS-Pset-BinOp", "right operand", p2, err)) return err;
            return lokv(mk_lval(LPSet{set_union(p1, p2)}));
          }
          int64_t i1, i2;
          Prot ps1, ps2;
          uint64_t h1, h2;
          if (!want_lint(v1, "DS-Int-BinOp", "left operand", i1, ps1, h1, err)) return err;
          if (!want_lint(v2, "DS-Int-BinOp", "right operand", i2, ps2, h2, err)) return err;
          if (!(ps1 == ps2))
            return lstuck("DS-Int-BinOp", "operand protocols differ: " +
                                              render_prot(ps1) + " vs " + render_prot(ps2));
          if (!compatible(ps1, m))
            return lstuck("DS-Int-BinOp", "protocol " + render_prot(ps1) +
                                              " incompatible with mode " + pset_to_string(m));
          if (net && !ps1.is_clear()) {
            uint64_t h = net->do_binop(n.op, h1, h2);
            return lokv(mk_lval(LInt{net->share_of(h, cfg.self), ps1, h}));
          }
          return lokv(mk_lval(LInt{eval_int_binop(n.op, i1, i2), ps1}));
        } else if constexpr (std::is_same_v<T, AMux>) {
          LValP vc, vt, ve;
          if (!llookup(cfg, n.cond, vc, "DS-Mux", err)) return err;
          if (!llookup(cfg, n.on_true, vt, "DS-Mux", err)) return err;
          if (!llookup(cfg, n.on_false, ve, "DS-Mux", err)) return err;
          int64_t i1, i2, i3;
          Prot p1, p2, p3;
          uint64_t h1, h2, h3;
          if (!want_lint(vc, "DS-Mux", "condition", i1, p1, h1, err)) return err;
          if (!want_lint(vt, "DS-Mux", "first branch", i2, p2, h2, err)) return err;
          if (!want_lint(ve, "DS-Mux", "second branch", i3, p3, h3, err)) return err;
          if (!(p1 == p2) || !(p2 == p3))
            return lstuck("DS-Mux", "operand protocols differ");
          if (!compatible(p1, m))
            return lstuck("DS-Mux", "protocol incompatible with mode");
          if (net && !p1.is_clear()) {
            uint64_t h = net->do_mux(h1, h2, h3);
            return lokv(mk_lval(LInt{net->share_of(h, cfg.self), p1, h}));
          }
          return lokv(mk_lval(LInt{eval_cond(i1, i2, i3), p1}));
        } else if constexpr (std::is_same_v<T, AInj>) {
          LValP v;
          if (!llookup(cfg, n.payload, v, "DS-Inj", err)) return err;
          return lokv(mk_lval(LInj{n.index, v}));
        } else if constexpr (std::is_same_v<T, APair>) {
          LValP v1, v2;
          if (!llookup(cfg, n.first, v1, "DS-Pair", err)) return err;
          if (!llookup(cfg, n.second, v2, "DS-Pair", err)) return err;
          return lokv(mk_lval(LPair{v1, v2}));
        } else if constexpr (std::is_same_v<T, AProj>) {
          LValP v;
          if (!llookup(cfg, n.payload, v, "DS-Proj", err)) return err;
          if (v->star) return lstuck("DS-Proj", "projecting from *");
          const LPair *p = std::get_if<LPair>(&v->u);
          if (!p) return lstuck("DS-Proj", "operand is not a pair");
          return lokv(n.index == 1 ? p->first : p->second);
        } else if constexpr (std::is_same_v<T, AFun>) {
          LClosure c;
          c.fn = std::make_shared<const AFun>(n);
          for (const auto &x : free_vars_atom(Atom{n})) {
            auto it = cfg.env.m.find(x);
            if (it == cfg.env.m.end())
              return lstuck("DS-Fun", "unbound variable " + x + " in closure");
            c.env.m[x] = it->second;
          }
          return lokv(mk_lval(std::move(c)));
        } else if constexpr (std::is_same_v<T, ARef>) {
          LValP v;
          if (!llookup(cfg, n.init, v, "DS-Ref", err)) return err;
          uint64_t loc = cfg.next_loc++;
          cfg.store[loc] = v;
          return lokv(mk_lval(LRef{loc, m}));
        } else if constexpr (std::is_same_v<T, ADeref>) {
          LValP v;
          if (!llookup(cfg, n.ref, v, "DS-Deref", err)) return err;
          if (v->star) return lstuck("DS-Deref", "dereferencing *");
          const LRef *r = std::get_if<LRef>(&v->u);
          if (!r) return lstuck("DS-Deref", "operand is not a reference");
          auto it = cfg.store.find(r->loc);
          if (it == cfg.store.end()) return lstuck("DS-Deref", "dangling location");
          return lokv(it->second);
        } else if constexpr (std::is_same_v<T, AAssign>) {
          LValP v, v2;
          if (!llookup(cfg, n.ref, v, "DS-Assign", err)) return err;
          if (v->star) return lstuck("DS-Assign", "assigning through *");
          const LRef *r = std::get_if<LRef>(&v->u);
          if (!r) return lstuck("DS-Assign", "operand is not a reference");
          if (r->creators != m)
            return lstuck("DS-Assign", "creator set " + pset_to_string(r->creators) +
                                           " does not match mode " + pset_to_string(m));
          if (!llookup(cfg, n.value, v2, "DS-Assign", err)) return err;
          cfg.store[r->loc] = v2;
          return lokv(v2);
        } else if constexpr (std::is_same_v<T, ARead>) {
          if (m.size() != 1)
            return lstuck("DS-Read", "mode " + pset_to_string(m) + " is not a singleton");
          if (*m.begin() != cfg.self)
            return lstuck("DS-Read", "mode does not contain this party");
          auto &q = io.inputs[cfg.self];
          if (q.empty())
            return lstuck("DS-Read", "input queue for " + cfg.self + " exhausted");
          int64_t i = q.front();
          q.pop_front();
          return lokv(mk_lval(LInt{i, clear_prot()}));
        } else if constexpr (std::is_same_v<T, AWrite>) {
          if (m.size() != 1)
            return lstuck("DS-Write", "mode " + pset_to_string(m) + " is not a singleton");
          if (*m.begin() != cfg.self)
            return lstuck("DS-Write", "mode does not contain this party");
          LValP v;
          if (!llookup(cfg, n.value, v, "DS-Write", err)) return err;
          int64_t i;
          Prot prot;
          uint64_t h;
          if (!want_lint(v, "DS-Write", "operand", i, prot, h, err)) return err;
          if (!prot.is_clear()) return lstuck("DS-Write", "operand is not cleartext");
          io.outputs[cfg.self].push_back(i);
          return lokv(mk_lval(LInt{0, clear_prot()}));
        } else {
          throw std::logic_error("ds_atomic: share/reveal must go through sync_step");
        }
      },
      a);
}

namespace {

bool is_sync_atom(const Expr &e, SyncKind &kind) {
  const EAtom *ea = std::get_if<EAtom>(&e.node);
  if (!ea) return false;
  if (std::holds_alternative<AShare>(ea->atom)) {
    kind = SyncKind::Share;
    return true;
  }
  if (std::holds_alternative<AReveal>(ea->atom)) {
    kind = SyncKind::Reveal;
    return true;
  }
  return false;
}

LStepRes lres(LStepRes::Kind k, std::string rule) {
  LStepRes r;
  r.kind = k;
  r.rule = std::move(rule);
  return r;
}

LStepRes lres_stuck(StuckInfo s) {
  LStepRes r;
  r.kind = LStepRes::LocalStuck;
  r.rule = s.rule;
  r.stuck_info = std::move(s);
  return r;
}

}  // namespace

LStepRes local_step(LocalConfig &cfg, InputOracle &io, NetRuntime *net) {
  LStepRes res;
  SyncKind sk;
  if (is_sync_atom(*cfg.expr, sk)) {
    res.kind = LStepRes::NeedsSync;
    res.sync = sk;
    res.rule = sk == SyncKind::Share ? "DS-Share" : "DS-Reveal";
    return res;
  }
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ELet>) {
          LFrame f;
          f.binder = n.binder;
          f.body = n.body;
          f.saved_mode = cfg.mode;
          f.saved_env = cfg.env;
          cfg.stack.push_back(std::move(f));
          cfg.expr = n.bound;
          res = lres(LStepRes::Stepped, "DS-LetPush");
        } else if constexpr (std::is_same_v<T, EAtom>) {
          if (cfg.stack.empty()) {
            // terminal probe: atom must step (on copies, no mutation)
            LocalConfig probe = cfg;
            InputOracle io_probe = io;
            LAtomRes r = ds_atomic(probe, n.atom, io_probe, net);
            if (!r.ok) {
              res = lres_stuck(r.stuck);
              return;
            }
            res = lres(LStepRes::LocalTerminal, "terminal");
            res.final = r.v;
            return;
          }
          LAtomRes r = ds_atomic(cfg, n.atom, io, net);
          if (!r.ok) {
            res = lres_stuck(r.stuck);
            return;
          }
          LFrame f = cfg.stack.back();
          cfg.stack.pop_back();
          cfg.mode = f.saved_mode;
          cfg.env = f.saved_env;
          cfg.env.m[f.binder] = r.v;
          cfg.expr = f.body;
          res = lres(LStepRes::Stepped, "DS-LetPop");
        } else if constexpr (std::is_same_v<T, EApp>) {
          auto fail = [&](const std::string &msg) {
            res = lres_stuck(StuckInfo{"DS-App", msg});
          };
          auto fit = cfg.env.m.find(n.fn);
          if (fit == cfg.env.m.end()) return fail("unbound variable " + n.fn);
          LValP v1 = fit->second;
          if (v1->star) return fail("applying *");
          const LClosure *c = std::get_if<LClosure>(&v1->u);
          if (!c) return fail("applying a non-closure");
          auto ait = cfg.env.m.find(n.arg);
          if (ait == cfg.env.m.end()) return fail("unbound variable " + n.arg);
          LValP v2 = ait->second;
          LEnv env = c->env;
          env.m[c->fn->self] = v1;
          env.m[c->fn->param] = v2;
          cfg.env = std::move(env);
          cfg.expr = c->fn->body;
          res = lres(LStepRes::Stepped, "DS-App");
        } else if constexpr (std::is_same_v<T, EPar>) {
          auto fail = [&](const char *rule, const std::string &msg) {
            res = lres_stuck(StuckInfo{rule, msg});
          };
          auto it = cfg.env.m.find(n.pset);
          if (it == cfg.env.m.end()) return fail("DS-Par", "unbound variable " + n.pset);
          LValP v = it->second;
          if (v->star) return fail("DS-Par", "par operand is *");
          const LPSet *ps = std::get_if<LPSet>(&v->u);
          if (!ps) return fail("DS-Par", "par operand is not a party set");
          if (ps->p.count(cfg.self)) {
            cfg.mode = intersect(cfg.mode, ps->p);
            cfg.expr = n.body;
            res = lres(LStepRes::Stepped, "DS-Par");
          } else {
            std::string x = "%" + std::to_string(cfg.next_fresh++);
            cfg.env.m[x] = star_lval();
            cfg.expr = mk_atom(Atom{AVar{x}});
            res = lres(LStepRes::Stepped, "DS-ParEmpty");
          }
        } else if constexpr (std::is_same_v<T, ECaseSum>) {
          auto fail = [&](const std::string &msg) {
            res = lres_stuck(StuckInfo{"DS-Case-Inj", msg});
          };
          auto it = cfg.env.m.find(n.subject);
          if (it == cfg.env.m.end()) return fail("unbound variable " + n.subject);
          LValP v = it->second;
          if (v->star) return fail("case on *");
          const LInj *inj = std::get_if<LInj>(&v->u);
          if (!inj) return fail("case subject is not an injection");
          if (inj->index == 1) {
            cfg.env.m[n.binder1] = inj->payload;
            cfg.expr = n.branch1;
          } else {
            cfg.env.m[n.binder2] = inj->payload;
            cfg.expr = n.branch2;
          }
          res = lres(LStepRes::Stepped, "DS-Case-Inj");
        } else if constexpr (std::is_same_v<T, ECasePSet>) {
          auto fail = [&](const std::string &msg) {
            res = lres_stuck(StuckInfo{"DS-Case-Pset", msg});
          };
          auto it = cfg.env.m.find(n.subject);
          if (it == cfg.env.m.end()) return fail("unbound variable " + n.subject);
          LValP v = it->second;
          if (v->star) return fail("case on *");
          const LPSet *ps = std::get_if<LPSet>(&v->u);
          if (!ps) return fail("case subject is not a party set");
          if (ps->p.empty()) {
            cfg.expr = n.on_empty;
            res = lres(LStepRes::Stepped, "DS-Case-Pset-Emp");
          } else {
            PartyId b = *ps->p.begin();  // minimum party
            PartySet rest = ps->p;
            rest.erase(b);
            cfg.env.m[n.head_binder] = mk_lval(LPSet{{b}});
            cfg.env.m[n.tail_binder] = mk_lval(LPSet{rest});
            cfg.expr = n.on_cons;
            res = lres(LStepRes::Stepped, "DS-Case-Pset-Cons");
          }
        } else if constexpr (std::is_same_v<T, EIf>) {
          auto fail = [&](const std::string &msg) {
            res = lres_stuck(StuckInfo{"DS-If", msg});
          };
          auto it = cfg.env.m.find(n.cond);
          if (it == cfg.env.m.end()) return fail("unbound variable " + n.cond);
          LValP v = it->second;
          if (v->star) return fail("branching on *");
          const LInt *i = std::get_if<LInt>(&v->u);
          if (!i) return fail("condition is not an integer");
          if (!i->prot.is_clear()) return fail("branching on an encrypted value");
          cfg.expr = i->v != 0 ? n.on_true : n.on_false;
          res = lres(LStepRes::Stepped, "DS-If");
        }
      },
      cfg.expr->node);
  return res;
}

LStepRes classify_local(const LocalConfig &cfg, InputOracle &io, NetRuntime *net) {
  LocalConfig tmp = cfg;
  InputOracle tmp_io = io;
  return local_step(tmp, tmp_io, net);
}

namespace {

// Per-party view of a pending share/reveal: premises checked locally
// (Def. B.3 — a party whose own premises fail is locally stuck).
struct ParkInfo {
  bool stuck = false;
  StuckInfo why;
  SyncKind kind = SyncKind::Share;
  PartySet p, q;
  std::string payload_var;
};

ParkInfo inspect_parked(const LocalConfig &cfg, SyncKind kind) {
  ParkInfo out;
  out.kind = kind;
  const char *rule = kind == SyncKind::Share ? "DS-Share" : "DS-Reveal";
  const EAtom &ea = std::get<EAtom>(cfg.expr->node);
  std::string src, dst;
  if (kind == SyncKind::Share) {
    const AShare &s = std::get<AShare>(ea.atom);
    src = s.src;
    dst = s.dst;
    out.payload_var = s.payload;
  } else {
    const AReveal &s = std::get<AReveal>(ea.atom);
    src = s.src;
    dst = s.dst;
    out.payload_var = s.payload;
  }
  auto fail = [&](const std::string &msg) {
    out.stuck = true;
    out.why = StuckInfo{rule, msg};
    return out;
  };
  auto pit = cfg.env.m.find(src);
  if (pit == cfg.env.m.end()) return fail("unbound variable " + src);
  auto qit = cfg.env.m.find(dst);
  if (qit == cfg.env.m.end()) return fail("unbound variable " + dst);
  const LValP &vp = pit->second;
  const LValP &vq = qit->second;
  if (vp->star || !std::holds_alternative<LPSet>(vp->u))
    return fail("source set is not a party set");
  if (vq->star || !std::holds_alternative<LPSet>(vq->u))
    return fail("destination set is not a party set");
  out.p = std::get<LPSet>(vp->u).p;
  out.q = std::get<LPSet>(vq->u).p;
  if (out.p.empty()) return fail("empty source set");
  if (out.q.empty()) return fail("empty destination set");
  if (set_union(out.p, out.q) != cfg.mode)
    return fail("mode " + pset_to_string(cfg.mode) + " is not p \\/ q = " +
                pset_to_string(set_union(out.p, out.q)));
  return out;
}

std::string group_signature(const ParkInfo &pi) {
  return std::string(pi.kind == SyncKind::Share ? "S" : "R") + "|" +
         pset_to_string(pi.p) + "|" + pset_to_string(pi.q);
}

// Payloads are trees of pairs and sums over integer leaves; every leaf must
// carry the right protocol for the sync kind.
bool check_lpayload(const LValP &v, const PartySet &p, bool is_share,
                    std::string &msg) {
  if (v->star) {
    msg = "payload contains *";
    return false;
  }
  if (const LInt *n = std::get_if<LInt>(&v->u)) {
    if (is_share) {
      if (!compatible(n->prot, p)) {
        msg = "payload protocol " + render_prot(n->prot) +
              " incompatible with source set " + pset_to_string(p);
        return false;
      }
      return true;
    }
    if (n->prot.is_clear() || n->prot.enc != p) {
      msg = "payload is not enc#" + pset_to_string(p);
      return false;
    }
    return true;
  }
  if (const LPair *pr = std::get_if<LPair>(&v->u))
    return check_lpayload(pr->first, p, is_share, msg) &&
           check_lpayload(pr->second, p, is_share, msg);
  if (const LInj *in = std::get_if<LInj>(&v->u))
    return check_lpayload(in->payload, p, is_share, msg);
  msg = "payload is not built from integers, pairs and sums";
  return false;
}

// Provider agreement; in concrete mode encrypted leaves agree on handles.
std::string payload_sig(const LValP &v, bool concrete) {
  if (v->star) return "*";
  if (const LInt *n = std::get_if<LInt>(&v->u)) {
    if (concrete && !n->prot.is_clear())
      return "h" + std::to_string(n->handle) + render_prot(n->prot);
    return "i" + std::to_string(n->v) + render_prot(n->prot);
  }
  if (const LPair *pr = std::get_if<LPair>(&v->u))
    return "(" + payload_sig(pr->first, concrete) + "," +
           payload_sig(pr->second, concrete) + ")";
  if (const LInj *in = std::get_if<LInj>(&v->u))
    return "inj" + std::to_string(in->index) + "(" +
           payload_sig(in->payload, concrete) + ")";
  return "?";
}

// Result template: runs each leaf's network operation once.
LValP sync_result_tmpl(const LValP &pay, SyncKind k, const PartySet &q,
                       NetRuntime *net) {
  if (const LInt *n = std::get_if<LInt>(&pay->u)) {
    if (k == SyncKind::Share) {
      uint64_t h = 0;
      if (net)
        h = n->prot.is_clear() ? net->do_split(n->v, q)
                               : net->do_reshare(n->handle, q);
      return mk_lval(LInt{n->v, enc_prot(q), h});
    }
    int64_t i = net ? net->do_combine(n->handle) : n->v;
    return mk_lval(LInt{i, clear_prot(), 0});
  }
  if (const LPair *pr = std::get_if<LPair>(&pay->u))
    return mk_lval(LPair{sync_result_tmpl(pr->first, k, q, net),
                         sync_result_tmpl(pr->second, k, q, net)});
  const LInj &in = std::get<LInj>(pay->u);
  return mk_lval(LInj{in.index, sync_result_tmpl(in.payload, k, q, net)});
}

// Concrete shares differ per member; swap in A's own share at each leaf.
LValP instantiate_for(const LValP &t, const PartyId &A, NetRuntime *net) {
  if (const LInt *n = std::get_if<LInt>(&t->u)) {
    if (n->prot.is_clear()) return t;
    return mk_lval(LInt{net->share_of(n->handle, A), n->prot, n->handle});
  }
  if (const LPair *pr = std::get_if<LPair>(&t->u))
    return mk_lval(LPair{instantiate_for(pr->first, A, net),
                         instantiate_for(pr->second, A, net)});
  const LInj &in = std::get<LInj>(t->u);
  return mk_lval(LInj{in.index, instantiate_for(in.payload, A, net)});
}

}  // namespace

EnabledActions ds_enabled(const DistConfig &C, InputOracle &io, NetRuntime *net) {
  EnabledActions en;
  std::map<std::string, std::vector<std::pair<PartyId, ParkInfo>>> groups;
  std::vector<PartyId> parked;
  for (const auto &[A, cfg] : C.parties) {
    LStepRes r = classify_local(cfg, io, net);
    switch (r.kind) {
      case LStepRes::Stepped:
        en.steppers.push_back(A);
        break;
      case LStepRes::LocalTerminal:
        en.terminal.push_back(A);
        en.finals[A] = r.final;
        break;
      case LStepRes::LocalStuck:
        en.stuck.emplace_back(A, r.stuck_info);
        break;
      case LStepRes::NeedsSync: {
        ParkInfo pi = inspect_parked(cfg, r.sync);
        if (pi.stuck) {
          en.stuck.emplace_back(A, pi.why);
        } else {
          groups[group_signature(pi)].emplace_back(A, pi);
          parked.push_back(A);
        }
        break;
      }
    }
  }
  for (auto &[sig, members] : groups) {
    const ParkInfo &pi0 = members.front().second;
    PartySet group = set_union(pi0.p, pi0.q);
    const char *rule = pi0.kind == SyncKind::Share ? "DS-Share" : "DS-Reveal";
    if (members.size() != group.size()) {
      for (auto &[A, pi] : members) en.blocked.push_back(A);
      continue;
    }
    // group complete — validate the providers' payloads
    bool bad = false;
    bool have = false;
    LValP agreed;
    std::string agreed_sig;
    for (auto &[A, pi] : members) {
      if (!pi0.p.count(A)) continue;
      const LocalConfig &cfg = C.parties.at(A);
      auto it = cfg.env.m.find(pi.payload_var);
      auto provider_stuck = [&](const std::string &msg) {
        en.stuck.emplace_back(A, StuckInfo{rule, msg});
        bad = true;
      };
      if (it == cfg.env.m.end()) {
        provider_stuck("unbound variable " + pi.payload_var);
        continue;
      }
      const LValP &v = it->second;
      std::string msg;
      if (!check_lpayload(v, pi0.p, pi0.kind == SyncKind::Share, msg)) {
        provider_stuck(msg);
        continue;
      }
      std::string sig = payload_sig(v, net != nullptr);
      if (!have) {
        have = true;
        agreed = v;
        agreed_sig = sig;
      } else if (sig != agreed_sig) {
        provider_stuck("providers disagree on the payload");
      }
    }
    if (bad || !have) {
      for (auto &[A, pi] : members)
        if (std::find_if(en.stuck.begin(), en.stuck.end(),
                         [&A = A](const auto &s) { return s.first == A; }) ==
            en.stuck.end())
          en.blocked.push_back(A);
      continue;
    }
    SyncGroup g;
    g.kind = pi0.kind;
    g.p = pi0.p;
    g.q = pi0.q;
    g.mode = group;
    g.expr = C.parties.at(members.front().first).expr;
    g.payload = agreed;
    en.syncs.push_back(std::move(g));
  }
  return en;
}

void sync_step(DistConfig &C, const SyncGroup &g, NetRuntime *net) {
  LValP tmpl = sync_result_tmpl(g.payload, g.kind, g.q, net);
  for (const auto &A : g.mode) {
    LocalConfig &cfg = C.parties.at(A);
    LValP v;
    if (!g.q.count(A)) {
      v = star_lval();
    } else if (net && g.kind == SyncKind::Share) {
      v = instantiate_for(tmpl, A, net);
    } else {
      v = tmpl;
    }
    std::string x = "%" + std::to_string(cfg.next_fresh++);
    cfg.env.m[x] = v;
    cfg.expr = mk_atom(Atom{AVar{x}});
  }
}

Scheduler Scheduler::round_robin() {
  Scheduler s;
  s.kind = RoundRobin;
  return s;
}

Scheduler Scheduler::seeded(uint64_t seed) {
  Scheduler s;
  s.kind = SeededRandom;
  s.rng.seed(seed);
  return s;
}

Scheduler Scheduler::scripted(std::vector<PartyId> sc) {
  Scheduler s;
  s.kind = Scripted;
  s.script = std::move(sc);
  return s;
}

namespace {

struct Action {
  bool is_sync = false;
  PartyId party;      // local step
  size_t sync_index = 0;
};

bool party_in_sync(const PartyId &A, const std::vector<SyncGroup> &syncs,
                   size_t &idx) {
  for (size_t i = 0; i < syncs.size(); i++)
    if (syncs[i].mode.count(A)) {
      idx = i;
      return true;
    }
  return false;
}

// Picks among steppers/syncs; returns false if the scheduler found nothing
// (cannot happen when the action set is non-empty — the fallback fires).
Action pick_action(Scheduler &sched, const EnabledActions &en,
                   const std::vector<PartyId> &all_parties) {
  Action act;
  auto try_party = [&](const PartyId &A) -> bool {
    if (std::find(en.steppers.begin(), en.steppers.end(), A) != en.steppers.end()) {
      act.is_sync = false;
      act.party = A;
      return true;
    }
    size_t idx;
    if (party_in_sync(A, en.syncs, idx)) {
      act.is_sync = true;
      act.sync_index = idx;
      return true;
    }
    return false;
  };
  switch (sched.kind) {
    case Scheduler::RoundRobin: {
      size_t n = all_parties.size();
      for (size_t i = 0; i < n; i++) {
        size_t pos = (sched.rr_pos + i) % n;
        if (try_party(all_parties[pos])) {
          sched.rr_pos = pos + 1;
          return act;
        }
      }
      break;
    }
    case Scheduler::SeededRandom: {
      size_t total = en.steppers.size() + en.syncs.size();
      size_t k = static_cast<size_t>(sched.rng() % total);
      if (k < en.steppers.size()) {
        act.is_sync = false;
        act.party = en.steppers[k];
      } else {
        act.is_sync = true;
        act.sync_index = k - en.steppers.size();
      }
      return act;
    }
    case Scheduler::Scripted: {
      size_t n = sched.script.size();
      for (size_t i = 0; i < n && n > 0; i++) {
        size_t pos = (sched.script_pos + i) % n;
        if (try_party(sched.script[pos])) {
          sched.script_pos = pos + 1;
          return act;
        }
      }
      break;  // fairness guard: fall through to the default pick
    }
  }
  if (!en.steppers.empty()) {
    act.is_sync = false;
    act.party = en.steppers.front();
  } else {
    act.is_sync = true;
    act.sync_index = 0;
  }
  return act;
}

}  // namespace

DsOutcome ds_run(DistConfig C, Scheduler &sched, InputOracle &io, uint64_t fuel,
                 NetRuntime *net, const TraceSink &trace, bool stop_on_stuck) {
  DsOutcome out;
  std::vector<PartyId> all_parties;
  for (const auto &[A, c] : C.parties) all_parties.push_back(A);
  for (uint64_t step = 0; step < fuel; step++) {
    EnabledActions en = ds_enabled(C, io, net);
    if (!en.stuck.empty() && stop_on_stuck) {
      out.kind = DsOutcome::LocallyStuck;
      out.witness = en.stuck.front().first;
      out.stuck_info = en.stuck.front().second;
      out.config = std::move(C);
      out.steps = step;
      return out;
    }
    if (en.terminal.size() == C.parties.size()) {
      // commit each terminal atom's I/O effect exactly once
      for (const auto &A : all_parties) {
        LocalConfig probe = C.parties.at(A);
        ds_atomic(probe, std::get<EAtom>(C.parties.at(A).expr->node).atom, io, net);
      }
      out.kind = DsOutcome::Terminal;
      out.finals = en.finals;
      out.config = std::move(C);
      out.steps = step;
      return out;
    }
    if (en.steppers.empty() && en.syncs.empty()) {
      if (!en.stuck.empty()) {
        out.kind = DsOutcome::LocallyStuck;
        out.witness = en.stuck.front().first;
        out.stuck_info = en.stuck.front().second;
      } else {
        out.kind = DsOutcome::Deadlock;
      }
      out.config = std::move(C);
      out.steps = step;
      return out;
    }
    Action act = pick_action(sched, en, all_parties);
    if (act.is_sync) {
      const SyncGroup &g = en.syncs[act.sync_index];
      if (trace)
        trace(std::to_string(step) + "\tSYNC" + pset_to_string(g.mode) + "\t" +
              (g.kind == SyncKind::Share ? "DS-Share" : "DS-Reveal") + "\t" +
              pset_to_string(g.mode));
      sync_step(C, g, net);
    } else {
      LocalConfig &cfg = C.parties.at(act.party);
      PartySet mode = cfg.mode;
      LStepRes r = local_step(cfg, io, net);
      if (r.kind != LStepRes::Stepped)
        throw std::logic_error("ds_run: scheduled party failed to step");
      if (trace)
        trace(std::to_string(step) + "\t" + act.party + "\t" + r.rule + "\t" +
              pset_to_string(mode));
    }
  }
  out.kind = DsOutcome::OutOfFuel;
  out.config = std::move(C);
  out.steps = fuel;
  return out;
}

std::vector<DistConfig> enumerate_successors(const DistConfig &C, InputOracle &io) {
  // intended for io-free programs: read effects in a branch are discarded
  EnabledActions en = ds_enabled(C, io, nullptr);
  std::vector<DistConfig> out;
  std::map<std::string, bool> seen;
  auto add = [&](DistConfig next) {
    std::string key = canonicalize_dist(next);
    if (seen.count(key)) return;
    seen[key] = true;
    out.push_back(std::move(next));
  };
  for (const auto &A : en.steppers) {
    DistConfig next = C;
    InputOracle io2 = io;
    LStepRes r = local_step(next.parties.at(A), io2, nullptr);
    if (r.kind != LStepRes::Stepped)
      throw std::logic_error("enumerate_successors: stepper failed to step");
    add(std::move(next));
  }
  for (const auto &g : en.syncs) {
    DistConfig next = C;
    sync_step(next, g, nullptr);
    add(std::move(next));
  }
  return out;
}

}  // namespace lsym

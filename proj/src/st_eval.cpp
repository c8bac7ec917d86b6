#include "lsym/st_eval.hpp"

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

bool subset(const PartySet &a, const PartySet &b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

AtomRes stuck(const char *rule, const std::string &reason) {
  AtomRes r;
  r.ok = false;
  r.stuck = StuckInfo{rule, reason};
  return r;
}

AtomRes okv(ValP v) {
  AtomRes r;
  r.ok = true;
  r.v = std::move(v);
  return r;
}

// γ(x)↓m; fails on unbound x.
bool lookup(const STConfig &cfg, const std::string &x, ValP &out,
            const char *rule, AtomRes &err) {
  auto it = cfg.env.m.find(x);
  if (it == cfg.env.m.end()) {
    err = stuck(rule, "unbound variable " + x);
    return false;
  }
  out = relocate(it->second, cfg.mode);
  return true;
}

// Expects an integer located at exactly m.
bool want_int(const ValP &v, const PartySet &m, const char *rule,
              const std::string &what, int64_t &i, Prot &prot, AtomRes &err) {
  if (v->star) {
    err = stuck(rule, what + " is *");
    return false;
  }
  const VInt *n = std::get_if<VInt>(&v->u);
  if (!n) {
    err = stuck(rule, what + " is not an integer");
    return false;
  }
  if (v->at != m) {
    err = stuck(rule, what + " located at " + pset_to_string(v->at) +
                          ", expected " + pset_to_string(m));
    return false;
  }
  i = n->v;
  prot = n->prot;
  return true;
}

// share/reveal distribute over pairs and sums; tags stay in the clear.
ValP xform_payload(const ValP &v, const PartySet &p, const PartySet &q,
                   bool is_share, std::string &msg) {
  if (v->star) {
    msg = "payload contains *";
    return nullptr;
  }
  if (const VInt *n = std::get_if<VInt>(&v->u)) {
    if (is_share) {
      if (!compatible(n->prot, p)) {
        msg = "payload protocol " + render_prot(n->prot) +
              " incompatible with source set " + pset_to_string(p);
        return nullptr;
      }
      return located(VInt{n->v, enc_prot(q), 0}, q);
    }
    if (n->prot.is_clear() || n->prot.enc != p) {
      msg = "payload is not enc#" + pset_to_string(p);
      return nullptr;
    }
    return located(VInt{n->v, clear_prot(), 0}, q);
  }
  if (const VPair *pr = std::get_if<VPair>(&v->u)) {
    ValP a = xform_payload(pr->first, p, q, is_share, msg);
    if (!a) return nullptr;
    ValP b = xform_payload(pr->second, p, q, is_share, msg);
    if (!b) return nullptr;
    return located(VPair{a, b}, q);
  }
  if (const VInj *in = std::get_if<VInj>(&v->u)) {
    ValP a = xform_payload(in->payload, p, q, is_share, msg);
    if (!a) return nullptr;
    return located(VInj{in->index, a}, q);
  }
  msg = "payload is not built from integers, pairs and sums";
  return nullptr;
}

bool want_pset(const ValP &v, const PartySet &m, const char *rule,
               const std::string &what, PartySet &p, AtomRes &err) {
  if (v->star) {
    err = stuck(rule, what + " is *");
    return false;
  }
  const VPSet *n = std::get_if<VPSet>(&v->u);
  if (!n) {
    err = stuck(rule, what + " is not a party set");
    return false;
  }
  if (v->at != m) {
    err = stuck(rule, what + " located at " + pset_to_string(v->at) +
                          ", expected " + pset_to_string(m));
    return false;
  }
  p = n->p;
  return true;
}

void assert_mode_compat(const ValP &v, const PartySet &m) {
  if (!v->star && !subset(v->at, m))
    throw std::logic_error("mode compatibility violated: value at " +
                           pset_to_string(v->at) + " in mode " + pset_to_string(m));
}

}  // namespace

STConfig st_initial(ExprPtr program, const PartySet &principals) {
  if (principals.empty()) throw std::logic_error("st_initial: no principals");
  STConfig cfg;
  cfg.mode = principals;
  cfg.expr = std::move(program);
  return cfg;
}

AtomRes st_atomic(STConfig &cfg, const Atom &a, InputOracle &io) {
  const PartySet &m = cfg.mode;
  AtomRes err;
  AtomRes out = std::visit(
      [&](const auto &n) -> AtomRes {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AVar>) {
          ValP v;
          if (!lookup(cfg, n.name, v, "ST-Var", err)) return err;
          return okv(v);
        } else if constexpr (std::is_same_v<T, ALit>) {
          return okv(located(VInt{n.value, clear_prot()}, m));
        } else if constexpr (std::is_same_v<T, APSetLit>) {
          return okv(located(VPSet{n.parties}, m));
        } else if constexpr (std::is_same_v<T, ABinOp>) {
          ValP v1, v2;
          if (!lookup(cfg, n.lhs, v1, "ST-BinOp", err)) return err;
          if (!lookup(cfg, n.rhs, v2, "ST-BinOp", err)) return err;
          if (n.op == BinOp::Union) {
            PartySet p1, p2;
            if (!want_pset(v1, m, "ST-Pset-BinOp", "left operand", p1, err)) return err;
            if (!want_pset(v2, m, "ST-Pset-BinOp", "right operand", p2, err)) return err;
            return okv(located(VPSet{set_union(p1, p2)}, m));
          }
          int64_t i1, i2;
          Prot ps1, ps2;
          if (!want_int(v1, m, "ST-Int-BinOp", "left operand", i1, ps1, err)) return err;
          if (!want_int(v2, m, "ST-Int-BinOp", "right operand", i2, ps2, err)) return err;
          if (!(ps1 == ps2))
            return stuck("ST-Int-BinOp", "operand protocols differ: " +
                                             render_prot(ps1) + " vs " + render_prot(ps2));
          if (!compatible(ps1, m))
            return stuck("ST-Int-BinOp", "protocol " + render_prot(ps1) +
                                             " incompatible with mode " + pset_to_string(m));
          return okv(located(VInt{eval_int_binop(n.op, i1, i2), ps1}, m));
        } else if constexpr (std::is_same_v<T, AMux>) {
          ValP vc, vt, ve;
          if (!lookup(cfg, n.cond, vc, "ST-Mux", err)) return err;
          if (!lookup(cfg, n.on_true, vt, "ST-Mux", err)) return err;
          if (!lookup(cfg, n.on_false, ve, "ST-Mux", err)) return err;
          int64_t i1, i2, i3;
          Prot p1, p2, p3;
          if (!want_int(vc, m, "ST-Mux", "condition", i1, p1, err)) return err;
          if (!want_int(vt, m, "ST-Mux", "first branch", i2, p2, err)) return err;
          if (!want_int(ve, m, "ST-Mux", "second branch", i3, p3, err)) return err;
          if (!(p1 == p2) || !(p2 == p3))
            return stuck("ST-Mux", "operand protocols differ");
          if (!compatible(p1, m))
            return stuck("ST-Mux", "protocol incompatible with mode");
          return okv(located(VInt{eval_cond(i1, i2, i3), p1}, m));
        } else if constexpr (std::is_same_v<T, AInj>) {
          ValP v;
          if (!lookup(cfg, n.payload, v, "ST-Inj", err)) return err;
          return okv(located(VInj{n.index, v}, m));
        } else if constexpr (std::is_same_v<T, APair>) {
          ValP v1, v2;
          if (!lookup(cfg, n.first, v1, "ST-Pair", err)) return err;
          if (!lookup(cfg, n.second, v2, "ST-Pair", err)) return err;
          return okv(located(VPair{v1, v2}, m));
        } else if constexpr (std::is_same_v<T, AProj>) {
          ValP v;
          if (!lookup(cfg, n.payload, v, "ST-Proj", err)) return err;
          if (v->star) return stuck("ST-Proj", "projecting from *");
          const VPair *p = std::get_if<VPair>(&v->u);
          if (!p) return stuck("ST-Proj", "operand is not a pair");
          if (v->at != m)
            return stuck("ST-Proj", "pair located at " + pset_to_string(v->at) +
                                        ", expected " + pset_to_string(m));
          return okv(n.index == 1 ? p->first : p->second);
        } else if constexpr (std::is_same_v<T, AFun>) {
          VClosure c;
          c.fn = std::make_shared<const AFun>(n);
          for (const auto &x : free_vars_atom(Atom{n})) {
            auto it = cfg.env.m.find(x);
            if (it == cfg.env.m.end())
              return stuck("ST-Fun", "unbound variable " + x + " in closure");
            c.env.m[x] = it->second;
          }
          return okv(located(std::move(c), m));
        } else if constexpr (std::is_same_v<T, ARef>) {
          ValP v;
          if (!lookup(cfg, n.init, v, "ST-Ref", err)) return err;
          uint64_t loc = cfg.next_loc++;
          cfg.store[loc] = v;
          return okv(located(VRef{loc, m}, m));
        } else if constexpr (std::is_same_v<T, ADeref>) {
          ValP v;
          if (!lookup(cfg, n.ref, v, "ST-Deref", err)) return err;
          if (v->star) return stuck("ST-Deref", "dereferencing *");
          const VRef *r = std::get_if<VRef>(&v->u);
          if (!r) return stuck("ST-Deref", "operand is not a reference");
          if (v->at != m)
            return stuck("ST-Deref", "reference located at " + pset_to_string(v->at) +
                                         ", expected " + pset_to_string(m));
          auto it = cfg.store.find(r->loc);
          if (it == cfg.store.end())
            return stuck("ST-Deref", "dangling location");
          return okv(relocate(it->second, m));
        } else if constexpr (std::is_same_v<T, AAssign>) {
          ValP v, v2;
          if (!lookup(cfg, n.ref, v, "ST-Assign", err)) return err;
          if (v->star) return stuck("ST-Assign", "assigning through *");
          const VRef *r = std::get_if<VRef>(&v->u);
          if (!r) return stuck("ST-Assign", "operand is not a reference");
          if (v->at != m)
            return stuck("ST-Assign", "reference located at " + pset_to_string(v->at) +
                                          ", expected " + pset_to_string(m));
          if (r->creators != m)
            return stuck("ST-Assign", "creator set " + pset_to_string(r->creators) +
                                          " does not match mode " + pset_to_string(m));
          if (!lookup(cfg, n.value, v2, "ST-Assign", err)) return err;
          cfg.store[r->loc] = v2;
          return okv(v2);
        } else if constexpr (std::is_same_v<T, ARead>) {
          if (m.size() != 1)
            return stuck("ST-Read", "mode " + pset_to_string(m) + " is not a singleton");
          const PartyId &who = *m.begin();
          auto &q = io.inputs[who];
          if (q.empty())
            return stuck("ST-Read", "input queue for " + who + " exhausted");
          int64_t i = q.front();
          q.pop_front();
          return okv(located(VInt{i, clear_prot()}, m));
        } else if constexpr (std::is_same_v<T, AWrite>) {
          if (m.size() != 1)
            return stuck("ST-Write", "mode " + pset_to_string(m) + " is not a singleton");
          ValP v;
          if (!lookup(cfg, n.value, v, "ST-Write", err)) return err;
          int64_t i;
          Prot prot;
          if (!want_int(v, m, "ST-Write", "operand", i, prot, err)) return err;
          if (!prot.is_clear()) return stuck("ST-Write", "operand is not cleartext");
          io.outputs[*m.begin()].push_back(i);
          return okv(located(VInt{0, clear_prot()}, m));
        } else if constexpr (std::is_same_v<T, AShare> || std::is_same_v<T, AReveal>) {
          const bool is_share = std::is_same_v<T, AShare>;
          const char *rule = is_share ? "ST-Share" : "ST-Reveal";
          ValP vp, vq, vi;
          if (!lookup(cfg, n.src, vp, rule, err)) return err;
          if (!lookup(cfg, n.dst, vq, rule, err)) return err;
          PartySet p, q;
          if (!want_pset(vp, m, rule, "source set", p, err)) return err;
          if (!want_pset(vq, m, rule, "destination set", q, err)) return err;
          if (p.empty()) return stuck(rule, "empty source set");
          if (q.empty()) return stuck(rule, "empty destination set");
          if (set_union(p, q) != m)
            return stuck(rule, "mode " + pset_to_string(m) + " is not p \\/ q = " +
                                   pset_to_string(set_union(p, q)));
          auto it = cfg.env.m.find(n.payload);
          if (it == cfg.env.m.end()) return stuck(rule, "unbound variable " + n.payload);
          ValP pay = relocate(it->second, p);
          std::string msg;
          ValP shared = xform_payload(pay, p, q, is_share, msg);
          if (!shared) return stuck(rule, msg);
          return okv(shared);
        } else {
          return stuck("ST-Atomic", "unhandled atom");
        }
      },
      a);
  if (out.ok) assert_mode_compat(out.v, m);
  return out;
}

StStep st_step(STConfig &cfg, InputOracle &io) {
  StStep res;
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ELet>) {
          Frame f;
          f.binder = n.binder;
          f.body = n.body;
          f.saved_mode = cfg.mode;
          f.saved_env = cfg.env;
          f.tag = cfg.next_tag++;
          cfg.stack.push_back(std::move(f));
          cfg.expr = n.bound;
          res.kind = StStep::Stepped;
          res.rule = "ST-LetPush";
        } else if constexpr (std::is_same_v<T, EAtom>) {
          AtomRes r = st_atomic(cfg, n.atom, io);
          if (!r.ok) {
            res.kind = StStep::Stuck;
            res.rule = r.stuck.rule;
            res.stuck_info = r.stuck;
            return;
          }
          if (cfg.stack.empty()) {
            res.kind = StStep::Terminal;
            res.rule = "terminal";
            res.final = r.v;
            return;
          }
          Frame f = cfg.stack.back();
          cfg.stack.pop_back();
          cfg.mode = f.saved_mode;
          cfg.env = f.saved_env;
          cfg.env.m[f.binder] = r.v;
          cfg.expr = f.body;
          res.kind = StStep::Stepped;
          res.rule = "ST-LetPop";
        } else if constexpr (std::is_same_v<T, EApp>) {
          auto fail = [&](const std::string &msg) {
            res.kind = StStep::Stuck;
            res.rule = "ST-App";
            res.stuck_info = StuckInfo{"ST-App", msg};
          };
          auto fit = cfg.env.m.find(n.fn);
          if (fit == cfg.env.m.end()) return fail("unbound variable " + n.fn);
          ValP v1 = relocate(fit->second, cfg.mode);
          if (v1->star) return fail("applying *");
          const VClosure *c = std::get_if<VClosure>(&v1->u);
          if (!c) return fail("applying a non-closure");
          if (v1->at != cfg.mode)
            return fail("closure located at " + pset_to_string(v1->at) +
                        ", expected " + pset_to_string(cfg.mode));
          auto ait = cfg.env.m.find(n.arg);
          if (ait == cfg.env.m.end()) return fail("unbound variable " + n.arg);
          ValP v2 = relocate(ait->second, cfg.mode);
          Env env = c->env;
          env.m[c->fn->self] = v1;
          env.m[c->fn->param] = v2;
          cfg.env = std::move(env);
          cfg.expr = c->fn->body;
          res.kind = StStep::Stepped;
          res.rule = "ST-App";
        } else if constexpr (std::is_same_v<T, EPar>) {
          auto fail = [&](const char *rule, const std::string &msg) {
            res.kind = StStep::Stuck;
            res.rule = rule;
            res.stuck_info = StuckInfo{rule, msg};
          };
          auto it = cfg.env.m.find(n.pset);
          if (it == cfg.env.m.end()) return fail("ST-Par", "unbound variable " + n.pset);
          ValP v = relocate(it->second, cfg.mode);
          if (v->star) return fail("ST-Par", "par operand is *");
          const VPSet *ps = std::get_if<VPSet>(&v->u);
          if (!ps) return fail("ST-Par", "par operand is not a party set");
          if (v->at != cfg.mode)
            return fail("ST-Par", "party set located at " + pset_to_string(v->at) +
                                      ", expected " + pset_to_string(cfg.mode));
          PartySet inter = intersect(cfg.mode, ps->p);
          if (!inter.empty()) {
            cfg.mode = inter;
            cfg.expr = n.body;
            res.kind = StStep::Stepped;
            res.rule = "ST-Par";
          } else {
            std::string x = "%" + std::to_string(cfg.next_fresh++);
            cfg.env.m[x] = star_value();
            cfg.expr = mk_atom(Atom{AVar{x}});
            res.kind = StStep::Stepped;
            res.rule = "ST-ParEmpty";
          }
        } else if constexpr (std::is_same_v<T, ECaseSum>) {
          auto fail = [&](const std::string &msg) {
            res.kind = StStep::Stuck;
            res.rule = "ST-Case-Inj";
            res.stuck_info = StuckInfo{"ST-Case-Inj", msg};
          };
          auto it = cfg.env.m.find(n.subject);
          if (it == cfg.env.m.end()) return fail("unbound variable " + n.subject);
          ValP v = relocate(it->second, cfg.mode);
          if (v->star) return fail("case on *");
          const VInj *inj = std::get_if<VInj>(&v->u);
          if (!inj) return fail("case subject is not an injection");
          if (v->at != cfg.mode)
            return fail("subject located at " + pset_to_string(v->at) +
                        ", expected " + pset_to_string(cfg.mode));
          if (inj->index == 1) {
            cfg.env.m[n.binder1] = inj->payload;
            cfg.expr = n.branch1;
          } else {
            cfg.env.m[n.binder2] = inj->payload;
            cfg.expr = n.branch2;
          }
          res.kind = StStep::Stepped;
          res.rule = "ST-Case-Inj";
        } else if constexpr (std::is_same_v<T, ECasePSet>) {
          auto fail = [&](const std::string &msg) {
            res.kind = StStep::Stuck;
            res.rule = "ST-Case-Pset";
            res.stuck_info = StuckInfo{"ST-Case-Pset", msg};
          };
          auto it = cfg.env.m.find(n.subject);
          if (it == cfg.env.m.end()) return fail("unbound variable " + n.subject);
          ValP v = relocate(it->second, cfg.mode);
          if (v->star) return fail("case on *");
          const VPSet *ps = std::get_if<VPSet>(&v->u);
          if (!ps) return fail("case subject is not a party set");
          if (v->at != cfg.mode)
            return fail("subject located at " + pset_to_string(v->at) +
                        ", expected " + pset_to_string(cfg.mode));
          if (ps->p.empty()) {
            cfg.expr = n.on_empty;
            res.rule = "ST-Case-Pset-Emp";
          } else {
            PartyId b = *ps->p.begin();  // minimum party
            PartySet rest = ps->p;
            rest.erase(b);
            cfg.env.m[n.head_binder] = located(VPSet{{b}}, cfg.mode);
            cfg.env.m[n.tail_binder] = located(VPSet{rest}, cfg.mode);
            cfg.expr = n.on_cons;
            res.rule = "ST-Case-Pset-Cons";
          }
          res.kind = StStep::Stepped;
        } else if constexpr (std::is_same_v<T, EIf>) {
          auto fail = [&](const std::string &msg) {
            res.kind = StStep::Stuck;
            res.rule = "ST-If";
            res.stuck_info = StuckInfo{"ST-If", msg};
          };
          auto it = cfg.env.m.find(n.cond);
          if (it == cfg.env.m.end()) return fail("unbound variable " + n.cond);
          ValP v = relocate(it->second, cfg.mode);
          if (v->star) return fail("branching on *");
          const VInt *i = std::get_if<VInt>(&v->u);
          if (!i) return fail("condition is not an integer");
          if (v->at != cfg.mode)
            return fail("condition located at " + pset_to_string(v->at) +
                        ", expected " + pset_to_string(cfg.mode));
          if (!i->prot.is_clear()) return fail("branching on an encrypted value");
          cfg.expr = i->v != 0 ? n.on_true : n.on_false;
          res.kind = StStep::Stepped;
          res.rule = "ST-If";
        }
      },
      cfg.expr->node);
  return res;
}

STOutcome st_run(STConfig cfg, InputOracle &io, uint64_t fuel, const TraceSink &trace) {
  STOutcome out;
  for (uint64_t step = 0; step < fuel; step++) {
    // terminal probe: stack ⊤ + atomic expr that steps (Def. B.1)
    if (cfg.stack.empty() && std::holds_alternative<EAtom>(cfg.expr->node)) {
      STConfig probe = cfg;
      InputOracle io_probe = io;
      AtomRes r = st_atomic(probe, std::get<EAtom>(cfg.expr->node).atom, io_probe);
      if (r.ok) {
        if (trace)
          trace(std::to_string(step) + "\tterminal\t" + pset_to_string(cfg.mode) +
                "\t" + expr_head(cfg.expr));
        io = io_probe;
        out.kind = STOutcome::Terminal;
        out.final = r.v;
        out.config = std::move(cfg);
        out.steps = step;
        return out;
      }
      out.kind = STOutcome::Stuck;
      out.stuck_info = r.stuck;
      out.config = std::move(cfg);
      out.steps = step;
      return out;
    }
    std::string head = expr_head(cfg.expr);
    PartySet mode = cfg.mode;
    StStep s = st_step(cfg, io);
    if (s.kind == StStep::Stuck) {
      out.kind = STOutcome::Stuck;
      out.stuck_info = s.stuck_info;
      out.config = std::move(cfg);
      out.steps = step;
      return out;
    }
    if (trace)
      trace(std::to_string(step) + "\t" + s.rule + "\t" + pset_to_string(mode) +
            "\t" + head);
  }
  out.kind = STOutcome::OutOfFuel;
  out.config = std::move(cfg);
  out.steps = fuel;
  return out;
}

}  // namespace lsym

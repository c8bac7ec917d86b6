#include "lsym/meta.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace lsym {

namespace {

MetaResult mk_pass() {
  MetaResult r;
  r.status = MetaResult::Pass;
  return r;
}

MetaResult mk_fail(std::string d) {
  MetaResult r;
  r.status = MetaResult::Fail;
  r.detail = std::move(d);
  return r;
}

MetaResult mk_inconclusive(std::string d) {
  MetaResult r;
  r.status = MetaResult::Inconclusive;
  r.detail = std::move(d);
  return r;
}

DsOutcome run_seeded(const ExprPtr &core, const PartySet &parties, InputOracle &io,
                     uint64_t seed, uint64_t fuel) {
  Scheduler s = Scheduler::seeded(seed);
  return ds_run(ds_initial(core, parties), s, io, fuel);
}

bool is_sync_expr(const ExprPtr &e) {
  const EAtom *ea = std::get_if<EAtom>(&e->node);
  return ea && (std::holds_alternative<AShare>(ea->atom) ||
                std::holds_alternative<AReveal>(ea->atom));
}

std::string render_outputs(const InputOracle &io) {
  std::ostringstream os;
  for (const auto &[A, xs] : io.outputs) {
    if (xs.empty()) continue;
    os << A << ":";
    for (int64_t x : xs) os << " " << x;
    os << ";";
  }
  return os.str();
}

}  // namespace

MetaResult check_terminal_correspondence(const ExprPtr &core, const PartySet &parties,
                                         const InputOracle &io,
                                         const std::vector<uint64_t> &seeds,
                                         uint64_t fuel) {
  InputOracle st_io = io;
  STOutcome st = st_run(st_initial(core, parties), st_io, fuel);
  if (st.kind == STOutcome::OutOfFuel) return mk_inconclusive("st run out of fuel");
  if (st.kind == STOutcome::Stuck)
    return mk_inconclusive("st run stuck at " + st.stuck_info.rule);

  // a program whose tail expression is itself a share/reveal parks the DS
  // parties one step past the ST terminal; compare final values only then
  bool tail_sync = is_sync_expr(st.config.expr);
  DistConfig sliced = slice_config(st.config);
  std::map<PartyId, std::string> want;
  for (const auto &[A, lc] : sliced.parties) want[A] = canonicalize_local(lc);
  std::string st_out = render_outputs(st_io);

  for (uint64_t seed : seeds) {
    InputOracle ds_io = io;
    DsOutcome ds = run_seeded(core, parties, ds_io, seed, fuel * 4 + 1000);
    if (ds.kind != DsOutcome::Terminal)
      return mk_fail("seed " + std::to_string(seed) + ": ds run did not terminate (" +
                     (ds.kind == DsOutcome::LocallyStuck
                          ? "stuck at " + ds.stuck_info.rule + " on " + ds.witness
                          : ds.kind == DsOutcome::Deadlock ? "deadlock" : "fuel") +
                     ")");
    for (const auto &A : st.config.mode) {
      auto it = ds.config.parties.find(A);
      if (it == ds.config.parties.end())
        return mk_fail("seed " + std::to_string(seed) + ": missing party " + A);
      if (!tail_sync && canonicalize_local(it->second) != want.at(A))
        return mk_fail("seed " + std::to_string(seed) + ": end state of " + A +
                       " differs from the st slice");
      if (!lval_equal(slice_value(st.final, A), ds.finals.at(A)))
        return mk_fail("seed " + std::to_string(seed) + ": final value of " + A +
                       " differs from the st slice");
    }
    if (render_outputs(ds_io) != st_out)
      return mk_fail("seed " + std::to_string(seed) + ": outputs differ");
  }
  MetaResult r = mk_pass();
  r.stats["seeds"] = std::to_string(seeds.size());
  r.stats["st_steps"] = std::to_string(st.steps);
  return r;
}

MetaResult check_stuck_soundness(const ExprPtr &core, const PartySet &parties,
                                 const InputOracle &io,
                                 const std::vector<uint64_t> &seeds, uint64_t fuel) {
  InputOracle st_io = io;
  STOutcome st = st_run(st_initial(core, parties), st_io, fuel);
  if (st.kind == STOutcome::OutOfFuel) return mk_inconclusive("st run out of fuel");
  if (st.kind == STOutcome::Terminal) return mk_inconclusive("st run terminates");

  for (uint64_t seed : seeds) {
    InputOracle ds_io = io;
    DsOutcome ds = run_seeded(core, parties, ds_io, seed, fuel * 4 + 1000);
    if (ds.kind == DsOutcome::Terminal)
      return mk_fail("seed " + std::to_string(seed) +
                     ": ds run terminated although st is stuck at " + st.stuck_info.rule);
    if (ds.kind == DsOutcome::OutOfFuel)
      return mk_inconclusive("seed " + std::to_string(seed) + ": ds run out of fuel");
    if (ds.kind == DsOutcome::Deadlock)
      return mk_fail("seed " + std::to_string(seed) + ": ds deadlock without a stuck party");
  }
  MetaResult r = mk_pass();
  r.stats["seeds"] = std::to_string(seeds.size());
  r.stats["st_rule"] = st.stuck_info.rule;
  return r;
}

MetaResult check_st_determinism(const ExprPtr &core, const PartySet &parties,
                                const InputOracle &io, int runs, uint64_t fuel) {
  std::string first_trace, first_state;
  for (int k = 0; k < runs; k++) {
    InputOracle st_io = io;
    std::ostringstream tr;
    STOutcome out = st_run(st_initial(core, parties), st_io, fuel,
                           [&](const std::string &l) { tr << l << "\n"; });
    std::string state = canonicalize_st(out.config) + "|" +
                        (out.kind == STOutcome::Terminal ? render_value(out.final)
                                                         : out.stuck_info.rule) +
                        "|" + render_outputs(st_io);
    if (k == 0) {
      first_trace = tr.str();
      first_state = state;
    } else if (tr.str() != first_trace) {
      return mk_fail("run " + std::to_string(k) + ": trace differs");
    } else if (state != first_state) {
      return mk_fail("run " + std::to_string(k) + ": end state differs");
    }
  }
  MetaResult r = mk_pass();
  r.stats["runs"] = std::to_string(runs);
  return r;
}

MetaResult check_confluence(const ExprPtr &core, const PartySet &parties,
                            const InputOracle &io,
                            const std::vector<uint64_t> &seeds, uint64_t fuel) {
  bool have = false;
  std::string want;
  uint64_t want_seed = 0;
  for (uint64_t seed : seeds) {
    InputOracle ds_io = io;
    Scheduler s = Scheduler::seeded(seed);
    // stop_on_stuck=false: stuck runs continue to their maximal configuration,
    // so their end states are comparable across schedules too
    DsOutcome ds = ds_run(ds_initial(core, parties), s, ds_io, fuel, nullptr,
                          nullptr, false);
    if (ds.kind == DsOutcome::OutOfFuel)
      return mk_inconclusive("seed " + std::to_string(seed) + ": out of fuel");
    std::string got = std::to_string(static_cast<int>(ds.kind)) + "|" +
                      canonicalize_dist(ds.config) + "|" + render_outputs(ds_io);
    if (!have) {
      have = true;
      want = got;
      want_seed = seed;
    } else if (got != want) {
      return mk_fail("seeds " + std::to_string(want_seed) + " and " +
                     std::to_string(seed) + " end in different states");
    }
  }
  MetaResult r = mk_pass();
  r.stats["seeds"] = std::to_string(seeds.size());
  return r;
}

MetaResult check_diamond(const ExprPtr &core, const PartySet &parties,
                         const InputOracle &io, size_t max_configs) {
  std::deque<DistConfig> queue;
  std::set<std::string> visited;
  queue.push_back(ds_initial(core, parties));
  size_t pairs = 0;
  bool capped = false;
  while (!queue.empty()) {
    DistConfig C = std::move(queue.front());
    queue.pop_front();
    std::string key = canonicalize_dist(C);
    if (!visited.insert(key).second) continue;
    if (visited.size() > max_configs) {
      capped = true;
      break;
    }
    InputOracle io2 = io;
    std::vector<DistConfig> succ = enumerate_successors(C, io2);
    std::vector<std::vector<std::string>> succ2_keys(succ.size());
    for (size_t i = 0; i < succ.size(); i++) {
      InputOracle io3 = io;
      for (const DistConfig &s2 : enumerate_successors(succ[i], io3))
        succ2_keys[i].push_back(canonicalize_dist(s2));
      std::sort(succ2_keys[i].begin(), succ2_keys[i].end());
    }
    for (size_t i = 0; i < succ.size(); i++) {
      for (size_t j = i + 1; j < succ.size(); j++) {
        pairs++;
        std::vector<std::string> common;
        std::set_intersection(succ2_keys[i].begin(), succ2_keys[i].end(),
                              succ2_keys[j].begin(), succ2_keys[j].end(),
                              std::back_inserter(common));
        if (common.empty())
          return mk_fail("divergent successors without a common join");
      }
    }
    for (DistConfig &s : succ) queue.push_back(std::move(s));
  }
  MetaResult r = mk_pass();
  r.stats["configs"] = std::to_string(visited.size());
  r.stats["pairs"] = std::to_string(pairs);
  if (capped) r.stats["capped"] = "1";
  return r;
}

MetaResult check_stuck_preservation(const ExprPtr &core, const PartySet &parties,
                                    const InputOracle &io,
                                    const std::vector<uint64_t> &seeds, uint64_t fuel,
                                    uint64_t extra_steps) {
  int witnessed = 0;
  for (uint64_t seed : seeds) {
    InputOracle ds_io = io;
    DsOutcome ds = run_seeded(core, parties, ds_io, seed, fuel);
    if (ds.kind != DsOutcome::LocallyStuck) continue;
    witnessed++;
    Scheduler cont_sched = Scheduler::seeded(seed ^ 0x5bd1e995u);
    DsOutcome cont = ds_run(std::move(ds.config), cont_sched, ds_io, extra_steps,
                            nullptr, nullptr, /*stop_on_stuck=*/false);
    EnabledActions en = ds_enabled(cont.config, ds_io, nullptr);
    auto it = std::find_if(en.stuck.begin(), en.stuck.end(),
                           [&](const auto &s) { return s.first == ds.witness; });
    if (it == en.stuck.end())
      return mk_fail("seed " + std::to_string(seed) + ": witness " + ds.witness +
                     " is no longer stuck after " + std::to_string(extra_steps) +
                     " extra steps");
    if (it->second.rule != ds.stuck_info.rule)
      return mk_fail("seed " + std::to_string(seed) + ": witness " + ds.witness +
                     " changed stuck rule " + ds.stuck_info.rule + " -> " +
                     it->second.rule);
  }
  if (witnessed == 0) return mk_inconclusive("no seed produced a stuck party");
  MetaResult r = mk_pass();
  r.stats["witnessed"] = std::to_string(witnessed);
  return r;
}

std::string meta_report_line(const std::string &theorem, const std::string &program,
                             size_t seeds, const MetaResult &r) {
  std::ostringstream os;
  os << theorem << " " << program << " " << seeds << " "
     << (r.status == MetaResult::Pass ? "PASS"
         : r.status == MetaResult::Fail ? "FAIL" : "INCONCLUSIVE");
  for (const auto &[k, v] : r.stats) os << " " << k << "=" << v;
  if (!r.detail.empty()) os << " detail=\"" << r.detail << "\"";
  return os.str();
}

// ---- random term generation ----

namespace {

enum Kind { KInt, KPSet, KPair, KSum, KFun, KEnc, KRef };

struct GenVar {
  std::string name;
  Kind kind = KInt;
  PartySet enc;  // KEnc owner set
  PartySet at;   // location set the value is known to live at
};

struct Gen {
  std::mt19937_64 &rng;
  const PartySet &all;
  std::map<std::string, int> &cov;
  int next = 0;

  uint64_t pick(uint64_t n) { return n == 0 ? 0 : rng() % n; }
  std::string fresh() { return "g" + std::to_string(next++); }

  // usable at `mode` means relocation to the mode succeeds; refs demand the
  // exact creating mode (assignment checks the creator set)
  const GenVar *find(const std::vector<GenVar> &vars, Kind k, const PartySet &mode,
                     bool exact = false) {
    std::vector<const GenVar *> c;
    for (const auto &v : vars) {
      if (v.kind != k) continue;
      bool ok = exact ? v.at == mode
                      : std::includes(v.at.begin(), v.at.end(), mode.begin(),
                                      mode.end());
      if (ok) c.push_back(&v);
    }
    if (c.empty()) return nullptr;
    return c[pick(c.size())];
  }

  PartySet rand_subset(const PartySet &m, bool nonempty) {
    PartySet out;
    for (const auto &A : m)
      if (pick(2)) out.insert(A);
    if (out.empty() && nonempty && !m.empty()) {
      auto it = m.begin();
      std::advance(it, pick(m.size()));
      out.insert(*it);
    }
    return out;
  }

  ExprPtr let_in(const std::string &x, ExprPtr bound, ExprPtr body) {
    return mk_expr(Expr{ELet{x, std::move(bound), std::move(body)}});
  }

  ExprPtr tail_atom(const std::vector<GenVar> &vars, const PartySet &mode) {
    const GenVar *v = find(vars, KInt, mode);
    if (v && pick(4)) return mk_atom(Atom{AVar{v->name}});
    return mk_atom(Atom{ALit{static_cast<int64_t>(pick(10))}});
  }

  // generates a let chain ending in an int-ish atom
  ExprPtr gen(std::vector<GenVar> vars, PartySet mode, int budget) {
    if (budget <= 0 || mode.empty()) return tail_atom(vars, mode);
    std::string x = fresh();
    ExprPtr bound;
    Kind xkind = KInt;
    PartySet xenc;
    PartySet xat = mode;

    const GenVar *iv1 = find(vars, KInt, mode);
    const GenVar *iv2 = find(vars, KInt, mode);
    int prod = static_cast<int>(pick(20));
    switch (prod) {
      case 0: default:
        cov["lit"]++;
        bound = mk_atom(Atom{ALit{static_cast<int64_t>(pick(100))}});
        break;
      case 1: {
        if (!iv1 || !iv2) { cov["lit"]++; bound = mk_atom(Atom{ALit{1}}); break; }
        cov["binop"]++;
        static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Mod,
                                    BinOp::Lt,  BinOp::Eq,  BinOp::And, BinOp::Xor};
        bound = mk_atom(Atom{ABinOp{ops[pick(8)], iv1->name, iv2->name}});
        break;
      }
      case 2: {
        const GenVar *c = find(vars, KInt, mode);
        if (!c || !iv1 || !iv2) { cov["lit"]++; bound = mk_atom(Atom{ALit{2}}); break; }
        cov["mux"]++;
        bound = mk_atom(Atom{AMux{c->name, iv1->name, iv2->name}});
        break;
      }
      case 3: {
        if (!iv1 || !iv2) { cov["lit"]++; bound = mk_atom(Atom{ALit{3}}); break; }
        cov["pair"]++;
        bound = mk_atom(Atom{APair{iv1->name, iv2->name}});
        xkind = KPair;
        break;
      }
      case 4: {
        const GenVar *p = find(vars, KPair, mode);
        if (!p) { cov["lit"]++; bound = mk_atom(Atom{ALit{4}}); break; }
        cov["proj"]++;
        bound = mk_atom(Atom{AProj{static_cast<int>(pick(2)) + 1, p->name}});
        break;
      }
      case 5: {
        if (!iv1) { cov["lit"]++; bound = mk_atom(Atom{ALit{5}}); break; }
        cov["inj"]++;
        bound = mk_atom(Atom{AInj{static_cast<int>(pick(2)) + 1, iv1->name}});
        xkind = KSum;
        break;
      }
      case 6: {
        const GenVar *s = find(vars, KSum, mode);
        if (!s) { cov["lit"]++; bound = mk_atom(Atom{ALit{6}}); break; }
        cov["case_sum"]++;
        std::string b1 = fresh(), b2 = fresh();
        std::vector<GenVar> v1 = vars, v2 = vars;
        v1.push_back({b1, KInt, {}, mode});
        v2.push_back({b2, KInt, {}, mode});
        bound = mk_expr(Expr{ECaseSum{s->name, b1, gen(v1, mode, budget / 3), b2,
                                      gen(v2, mode, budget / 3)}});
        break;
      }
      case 7: {
        cov["fun"]++;
        std::string self = fresh(), param = fresh();
        std::vector<GenVar> inner = vars;
        inner.push_back({param, KInt, {}, mode});
        bound = mk_atom(Atom{AFun{self, param, gen(inner, mode, budget / 4)}});
        xkind = KFun;
        break;
      }
      case 8: {
        const GenVar *f = find(vars, KFun, mode);
        if (!f || !iv1) { cov["lit"]++; bound = mk_atom(Atom{ALit{8}}); break; }
        cov["app"]++;
        bound = mk_expr(Expr{EApp{f->name, iv1->name}});
        break;
      }
      case 9: {
        if (!iv1) { cov["lit"]++; bound = mk_atom(Atom{ALit{9}}); break; }
        cov["ref"]++;
        bound = mk_atom(Atom{ARef{iv1->name}});
        xkind = KRef;
        break;
      }
      case 10: {
        const GenVar *rv = find(vars, KRef, mode, true);
        if (!rv) { cov["lit"]++; bound = mk_atom(Atom{ALit{10}}); break; }
        cov["deref"]++;
        bound = mk_atom(Atom{ADeref{rv->name}});
        break;
      }
      case 11: {
        const GenVar *rv = find(vars, KRef, mode, true);
        if (!rv || !iv1) { cov["lit"]++; bound = mk_atom(Atom{ALit{11}}); break; }
        cov["assign"]++;
        bound = mk_atom(Atom{AAssign{rv->name, iv1->name}});
        break;
      }
      case 12: {
        cov["pset"]++;
        bound = mk_atom(Atom{APSetLit{rand_subset(all, false)}});
        xkind = KPSet;
        break;
      }
      case 13: {
        const GenVar *ps = find(vars, KPSet, mode);
        if (!ps) { cov["lit"]++; bound = mk_atom(Atom{ALit{13}}); break; }
        cov["case_pset"]++;
        std::string hb = fresh(), tb = fresh();
        std::vector<GenVar> v2 = vars;
        v2.push_back({hb, KPSet, {}, mode});
        v2.push_back({tb, KPSet, {}, mode});
        bound = mk_expr(Expr{ECasePSet{ps->name, gen(vars, mode, budget / 3), hb, tb,
                                       gen(v2, mode, budget / 3)}});
        break;
      }
      case 14: {
        if (!iv1) { cov["lit"]++; bound = mk_atom(Atom{ALit{14}}); break; }
        cov["if"]++;
        bound = mk_expr(Expr{EIf{iv1->name, gen(vars, mode, budget / 3),
                                 gen(vars, mode, budget / 3)}});
        break;
      }
      case 15: case 16: {
        // par block, possibly with an empty intersection
        cov["par"]++;
        PartySet p = rand_subset(all, true);
        std::string pv = fresh();
        PartySet inner_mode;
        std::set_intersection(mode.begin(), mode.end(), p.begin(), p.end(),
                              std::inserter(inner_mode, inner_mode.begin()));
        ExprPtr body = inner_mode.empty() ? tail_atom(vars, mode)
                                          : gen(vars, inner_mode, budget / 2);
        xat = inner_mode;
        bound = let_in(pv, mk_atom(Atom{APSetLit{p}}),
                       mk_expr(Expr{EPar{pv, body}}));
        break;
      }
      case 17: case 18: {
        // share idiom: clear payload at p, shared among q, mode p \/ q
        cov["share"]++;
        PartySet m2 = rand_subset(mode, true);
        PartySet p = rand_subset(m2, true);
        PartySet q = rand_subset(m2, true);
        for (const auto &A : m2)
          if (!p.count(A)) q.insert(A);  // make p \/ q == m2
        if (q.empty()) q = p;
        std::string vp = fresh(), vq = fresh(), vm = fresh(), pay = fresh(),
                    pl = fresh();
        ExprPtr payload = let_in(
            pl, mk_atom(Atom{APSetLit{p}}),
            mk_expr(Expr{EPar{pl, mk_atom(Atom{ALit{static_cast<int64_t>(pick(50))}})}}));
        std::vector<GenVar> inner = vars;
        inner.push_back({x, KEnc, q, q});
        ExprPtr rest = gen(inner, mode, budget - 4);
        ExprPtr shr = let_in(
            vm, mk_atom(Atom{APSetLit{m2}}),
            mk_expr(Expr{EPar{vm, mk_atom(Atom{AShare{vp, vq, pay}})}}));
        return let_in(vp, mk_atom(Atom{APSetLit{p}}),
                      let_in(vq, mk_atom(Atom{APSetLit{q}}),
                             let_in(pay, std::move(payload),
                                    let_in(x, std::move(shr), std::move(rest)))));
      }
      case 19: {
        const GenVar *ev = find(vars, KEnc, PartySet{});
        if (!ev) { cov["lit"]++; bound = mk_atom(Atom{ALit{19}}); break; }
        cov["reveal"]++;
        if (!std::includes(mode.begin(), mode.end(), ev->enc.begin(), ev->enc.end())) {
          cov["lit"]++;
          bound = mk_atom(Atom{ALit{19}});
          break;
        }
        PartySet q = rand_subset(mode, true);
        PartySet m2 = ev->enc;
        m2.insert(q.begin(), q.end());
        std::string vp = fresh(), vq = fresh(), vm = fresh();
        std::vector<GenVar> inner = vars;
        inner.push_back({x, KInt, {}, q});
        ExprPtr rest = gen(inner, mode, budget - 3);
        ExprPtr rv = let_in(
            vm, mk_atom(Atom{APSetLit{m2}}),
            mk_expr(Expr{EPar{vm, mk_atom(Atom{AReveal{vp, vq, ev->name}})}}));
        return let_in(vp, mk_atom(Atom{APSetLit{ev->enc}}),
                      let_in(vq, mk_atom(Atom{APSetLit{q}}),
                             let_in(x, std::move(rv), std::move(rest))));
      }
    }
    vars.push_back({x, xkind, xenc, xat});
    ExprPtr rest = gen(vars, mode, budget - 1);
    return let_in(x, std::move(bound), std::move(rest));
  }
};

}  // namespace

TermGenerator::TermGenerator(uint64_t seed, int nparties) : rng(seed) {
  static const char *names[] = {"A", "B", "C", "D"};
  if (nparties < 1) nparties = 1;
  if (nparties > 4) nparties = 4;
  for (int i = 0; i < nparties; i++) parties.insert(names[i]);
}

ExprPtr TermGenerator::generate() {
  Gen g{rng, parties, coverage};
  return g.gen({}, parties, max_size);
}

}  // namespace lsym

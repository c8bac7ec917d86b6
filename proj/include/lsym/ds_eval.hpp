#pragma once

#include "lsym/netshare.hpp"
#include "lsym/st_eval.hpp"

namespace lsym {

struct LFrame {
  std::string binder;
  ExprPtr body;
  PartySet saved_mode;
  LEnv saved_env;
};

struct LocalConfig {
  PartyId self;
  PartySet mode;
  LEnv env;
  LStore store;
  std::vector<LFrame> stack;  // back() is the top frame
  ExprPtr expr;
  uint64_t next_loc = 0;
  uint64_t next_fresh = 0;
};

struct DistConfig {
  std::map<PartyId, LocalConfig> parties;
};

DistConfig ds_initial(ExprPtr program, const PartySet &principals);

// ζ⇓ per the slicing metafunction: domain is exactly st.mode.
DistConfig slice_config(const STConfig &st);

// Canonical text form: renames machine-generated fresh variables ("%N") and
// location ids by first-use order over a fixed traversal (expr, stack, env,
// then reachable store entries); unreachable store entries are dropped.
std::string canonicalize_local(const LocalConfig &c);
std::string canonicalize_dist(const DistConfig &c);
std::string canonicalize_st(const STConfig &c);

struct LAtomRes {
  bool ok = false;
  LValP v;
  StuckInfo stuck;
};

// γ̇ ⊢_m δ̇, a ↪ δ̇, v̇ (a must not be share/reveal).  net == nullptr selects
// the abstract mode; otherwise encrypted ops go through the share runtime.
LAtomRes ds_atomic(LocalConfig &cfg, const Atom &a, InputOracle &io, NetRuntime *net);

enum class SyncKind { Share, Reveal };

struct LStepRes {
  enum Kind { Stepped, NeedsSync, LocalTerminal, LocalStuck } kind = Stepped;
  std::string rule;
  SyncKind sync = SyncKind::Share;
  StuckInfo stuck_info;
  LValP final;  // LocalTerminal probe value
};

// Pure classification of one party's status (no state change).
LStepRes classify_local(const LocalConfig &cfg, InputOracle &io, NetRuntime *net);
// One ζ̇ ⟶_A ζ̇ step in place; returns NeedsSync/LocalTerminal/LocalStuck
// without mutating when the config cannot locally step.
LStepRes local_step(LocalConfig &cfg, InputOracle &io, NetRuntime *net);

struct SyncGroup {
  SyncKind kind = SyncKind::Share;
  PartySet p, q, mode;  // mode == p ∪ q
  ExprPtr expr;   // the shared head expression (for trace/debug)
  LValP payload;  // agreed payload (from the providers)
};

struct EnabledActions {
  std::vector<PartyId> steppers;
  std::vector<SyncGroup> syncs;  // complete, consistent, ready to fire
  std::vector<std::pair<PartyId, StuckInfo>> stuck;
  std::vector<PartyId> terminal;
  std::vector<PartyId> blocked;  // parked at a sync whose group is not ready
  std::map<PartyId, LValP> finals;  // probe values for terminal parties
};

EnabledActions ds_enabled(const DistConfig &C, InputOracle &io, NetRuntime *net);

// Applies DS-SHARE / DS-REVEAL for a ready group, advancing every member.
void sync_step(DistConfig &C, const SyncGroup &g, NetRuntime *net);

struct Scheduler {
  enum Kind { RoundRobin, SeededRandom, Scripted } kind = RoundRobin;
  std::mt19937_64 rng;
  std::vector<PartyId> script;
  size_t script_pos = 0;
  size_t rr_pos = 0;

  static Scheduler round_robin();
  static Scheduler seeded(uint64_t seed);
  static Scheduler scripted(std::vector<PartyId> s);
};

struct DsOutcome {
  enum Kind { Terminal, LocallyStuck, OutOfFuel, Deadlock } kind = OutOfFuel;
  DistConfig config;
  PartyId witness;       // LocallyStuck
  StuckInfo stuck_info;  // LocallyStuck
  uint64_t steps = 0;
  // final (probe) values per terminal party
  std::map<PartyId, LValP> finals;
};

// stop_on_stuck: report LocallyStuck as soon as some party is stuck
// (Def. B.3 classifies the whole configuration).  With false, other parties
// keep getting scheduled (used for the stuck-persistence check).
DsOutcome ds_run(DistConfig C, Scheduler &sched, InputOracle &io, uint64_t fuel,
                 NetRuntime *net = nullptr, const TraceSink &trace = nullptr,
                 bool stop_on_stuck = true);

// All one-step ⇝ successors (abstract mode), deduplicated canonically.
std::vector<DistConfig> enumerate_successors(const DistConfig &C, InputOracle &io);

}  // namespace lsym

#pragma once

#include <deque>
#include <functional>

#include "lsym/values.hpp"

namespace lsym {

struct StuckInfo {
  std::string rule;    // rule whose premise failed
  std::string reason;
};

struct InputOracle {
  std::map<PartyId, std::deque<int64_t>> inputs;
  std::map<PartyId, std::vector<int64_t>> outputs;
};

struct Frame {
  std::string binder;
  ExprPtr body;
  PartySet saved_mode;
  Env saved_env;
  uint64_t tag = 0;  // pairs letpush/letpop for the stack-discipline assert
};

struct STConfig {
  PartySet mode;
  Env env;
  Store store;
  std::vector<Frame> stack;  // back() is the top frame
  ExprPtr expr;
  uint64_t next_loc = 0;
  uint64_t next_fresh = 0;
  uint64_t next_tag = 0;
};

STConfig st_initial(ExprPtr program, const PartySet &principals);

struct AtomRes {
  bool ok = false;
  ValP v;
  StuckInfo stuck;
};

// γ ⊢_m δ, a ↪ δ, v.  Mutates cfg.store / cfg.next_loc on ref allocation.
AtomRes st_atomic(STConfig &cfg, const Atom &a, InputOracle &io);

struct StStep {
  enum Kind { Stepped, Terminal, Stuck } kind = Stepped;
  std::string rule;   // applied rule, for traces
  ValP final;         // Terminal
  StuckInfo stuck_info;
};

// One step of ζ ⟶ ζ, in place.  After Terminal/Stuck the config must not be
// stepped again (Terminal applies the final atomic effects).
StStep st_step(STConfig &cfg, InputOracle &io);

struct STOutcome {
  enum Kind { Terminal, Stuck, OutOfFuel } kind = OutOfFuel;
  ValP final;          // Terminal
  STConfig config;     // end configuration (pre-final-atom for Terminal)
  StuckInfo stuck_info;
  uint64_t steps = 0;
};

using TraceSink = std::function<void(const std::string &line)>;

STOutcome st_run(STConfig cfg, InputOracle &io, uint64_t fuel,
                 const TraceSink &trace = nullptr);

}  // namespace lsym

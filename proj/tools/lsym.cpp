#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lsym/ds_eval.hpp"
#include "lsym/manifest.hpp"

namespace {

using namespace lsym;

struct Options {
  std::string program_path;
  std::string manifest_path;
  std::string mode;
  std::string schedule;
  uint64_t seed = 0;
  uint64_t fuel = 0;
  bool seed_set = false, fuel_set = false;
  bool want_trace = false;
  bool no_prelude = false;
};

Scheduler make_scheduler(const std::string &spec, uint64_t seed) {
  if (spec == "rr") return Scheduler::round_robin();
  if (spec == "random") return Scheduler::seeded(seed);
  if (spec.rfind("scripted:", 0) == 0) {
    std::istringstream in(read_file(spec.substr(9)));
    std::vector<PartyId> script;
    std::string w;
    while (in >> w) script.push_back(w);
    if (script.empty()) throw std::runtime_error("empty schedule script");
    return Scheduler::scripted(std::move(script));
  }
  throw std::runtime_error("unknown schedule " + spec + " (rr | random | scripted:FILE)");
}

void print_outputs(const InputOracle &io) {
  for (const auto &[A, xs] : io.outputs) {
    std::cout << "output " << A << " =";
    for (int64_t x : xs) std::cout << " " << x;
    std::cout << "\n";
  }
}

int run_st(const ExprPtr &core, const PartySet &parties, InputOracle &io,
           const Options &opt) {
  TraceSink sink;
  if (opt.want_trace) sink = [](const std::string &l) { std::cout << l << "\n"; };
  STOutcome out = st_run(st_initial(core, parties), io, opt.fuel, sink);
  switch (out.kind) {
    case STOutcome::Terminal:
      std::cout << "outcome = terminal\n";
      std::cout << "st-value = " << render_value(out.final) << "\n";
      print_outputs(io);
      std::cout << "steps = " << out.steps << "\n";
      return 0;
    case STOutcome::Stuck:
      std::cout << "outcome = stuck\n";
      std::cout << "stuck = " << out.stuck_info.rule << ": " << out.stuck_info.reason
                << "\n";
      print_outputs(io);
      std::cout << "steps = " << out.steps << "\n";
      return 1;
    default:
      std::cout << "outcome = out-of-fuel\n";
      std::cout << "steps = " << out.steps << "\n";
      return 2;
  }
}

int run_ds(const ExprPtr &core, const PartySet &parties, InputOracle &io,
           const Options &opt, bool concrete) {
  Scheduler sched = make_scheduler(opt.schedule, opt.seed);
  std::unique_ptr<NetRuntime> net;
  if (concrete) net = std::make_unique<NetRuntime>(opt.seed);
  TraceSink sink;
  if (opt.want_trace) sink = [](const std::string &l) { std::cout << l << "\n"; };
  DsOutcome out = ds_run(ds_initial(core, parties), sched, io, opt.fuel, net.get(),
                         sink);
  switch (out.kind) {
    case DsOutcome::Terminal:
      std::cout << "outcome = terminal\n";
      for (const auto &[A, v] : out.finals)
        std::cout << "value " << A << " = " << render_lval(v) << "\n";
      print_outputs(io);
      std::cout << "steps = " << out.steps << "\n";
      return 0;
    case DsOutcome::LocallyStuck:
      std::cout << "outcome = stuck\n";
      std::cout << "witness = " << out.witness << "\n";
      std::cout << "stuck = " << out.stuck_info.rule << ": " << out.stuck_info.reason
                << "\n";
      print_outputs(io);
      std::cout << "steps = " << out.steps << "\n";
      return 1;
    case DsOutcome::Deadlock:
      std::cout << "outcome = deadlock\n";
      print_outputs(io);
      std::cout << "steps = " << out.steps << "\n";
      return 1;
    default:
      std::cout << "outcome = out-of-fuel\n";
      std::cout << "steps = " << out.steps << "\n";
      return 2;
  }
}

int do_command(const Options &opt_in, bool check_only) {
  Options opt = opt_in;
  Manifest man;
  if (!opt.manifest_path.empty()) man = load_manifest(opt.manifest_path);
  if (!opt.program_path.empty()) man.program = opt.program_path;
  if (!opt.mode.empty()) man.mode = opt.mode;
  if (!opt.schedule.empty()) man.schedule = opt.schedule;
  if (opt.seed_set) man.seed = opt.seed;
  if (opt.fuel_set) man.fuel = opt.fuel;
  if (man.program.empty()) {
    std::cerr << "error: no program given (positional argument or manifest)\n";
    return 3;
  }
  opt.mode = man.mode;
  opt.schedule = man.schedule;
  opt.seed = man.seed;
  opt.fuel = man.fuel;

  std::string text = read_file(man.program);
  if (!opt.no_prelude) text = std::string(prelude_text()) + "\n" + text;
  Program prog = parse(text);
  ExprPtr core = lower(prog);
  PartySet parties(prog.principals.begin(), prog.principals.end());
  if (check_only) {
    std::cout << "check ok\n";
    std::cout << "principals = " << pset_to_string(parties) << "\n";
    return 0;
  }
  InputOracle io = oracle_from_manifest(man);
  if (man.mode == "st") return run_st(core, parties, io, opt);
  return run_ds(core, parties, io, opt, man.mode == "ds-concrete");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"lsym: interpreters for a coordination-aware MPC core language"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("program", opt.program_path, "program file (.lsym)");
    cmd->add_option("--manifest", opt.manifest_path, "run manifest file");
    cmd->add_option("--mode", opt.mode, "st | ds-abstract | ds-concrete");
    cmd->add_option("--seed", opt.seed, "random seed")->each([&](const std::string &) {
      opt.seed_set = true;
    });
    cmd->add_option("--fuel", opt.fuel, "max steps")->each([&](const std::string &) {
      opt.fuel_set = true;
    });
    cmd->add_option("--schedule", opt.schedule, "rr | random | scripted:FILE");
    cmd->add_flag("--no-prelude", opt.no_prelude, "do not prepend the prelude");
  };

  CLI::App *run = app.add_subcommand("run", "execute a program");
  add_common(run);
  run->add_flag("--trace", opt.want_trace, "print a step trace");
  CLI::App *check = app.add_subcommand("check", "parse and lower only");
  add_common(check);
  CLI::App *trace = app.add_subcommand("trace", "execute with a step trace");
  add_common(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (run->parsed()) return do_command(opt, false);
    if (trace->parsed()) {
      opt.want_trace = true;
      return do_command(opt, false);
    }
    return do_command(opt, true);
  } catch (const lsym::ParseError &e) {
    std::cerr << "parse error at " << e.line << ":" << e.col << ": " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

#pragma once

#include "lsym/ds_eval.hpp"

namespace lsym {

struct MetaResult {
  enum Status { Pass, Fail, Inconclusive } status = Inconclusive;
  std::string detail;                        // first failure / reason
  std::map<std::string, std::string> stats;  // key=value summary entries
};

// Terminal correspondence: a terminating ST run and every seeded DS run end
// in canonically identical states (DS restricted to the ST terminal mode).
MetaResult check_terminal_correspondence(const ExprPtr &core, const PartySet &parties,
                                         const InputOracle &io,
                                         const std::vector<uint64_t> &seeds,
                                         uint64_t fuel);

// Stuck soundness: if the ST run gets stuck, every fairly-scheduled DS run
// reports a locally stuck party.
MetaResult check_stuck_soundness(const ExprPtr &core, const PartySet &parties,
                                 const InputOracle &io,
                                 const std::vector<uint64_t> &seeds, uint64_t fuel);

// ST determinism: repeated runs produce byte-identical traces and end states.
MetaResult check_st_determinism(const ExprPtr &core, const PartySet &parties,
                                const InputOracle &io, int runs, uint64_t fuel);

// Confluence: all seeded DS schedules that terminate end canonically equal.
MetaResult check_confluence(const ExprPtr &core, const PartySet &parties,
                            const InputOracle &io,
                            const std::vector<uint64_t> &seeds, uint64_t fuel);

// One-step diamond: any two distinct successors share a common successor.
// Explores the reachable configuration graph breadth-first (io-free terms).
MetaResult check_diamond(const ExprPtr &core, const PartySet &parties,
                         const InputOracle &io, size_t max_configs);

// Stuck preservation: a locally stuck party stays stuck (same rule) while
// the other parties keep being scheduled.
MetaResult check_stuck_preservation(const ExprPtr &core, const PartySet &parties,
                                    const InputOracle &io,
                                    const std::vector<uint64_t> &seeds, uint64_t fuel,
                                    uint64_t extra_steps);

// "THEOREM PROGRAM SEEDS PASS|FAIL|INCONCLUSIVE key=value ..."
std::string meta_report_line(const std::string &theorem, const std::string &program,
                             size_t seeds, const MetaResult &r);

// Random closed core terms over up to 4 parties, with kind-tracked variables
// and share/reveal idiom templates.  Tracks production coverage.
struct TermGenerator {
  std::mt19937_64 rng;
  PartySet parties;
  std::map<std::string, int> coverage;
  int max_size = 40;

  TermGenerator(uint64_t seed, int nparties);
  ExprPtr generate();
};

}  // namespace lsym

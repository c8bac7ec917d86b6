#pragma once

#include "lsym/st_eval.hpp"

namespace lsym {

// Plain key = value run description, with per-party input sections:
//
//   program = program.lsym
//   mode = ds-abstract        (st | ds-abstract | ds-concrete)
//   seed = 7
//   fuel = 100000
//   schedule = rr             (rr | random | scripted:FILE)
//   [party A]
//   inputs = 1 2 3
struct Manifest {
  std::string program;
  std::string mode = "st";
  uint64_t seed = 0;
  uint64_t fuel = 1000000;
  std::string schedule = "rr";
  std::map<PartyId, std::vector<int64_t>> inputs;
};

Manifest parse_manifest(const std::string &text);
// Reads the file; `program` is resolved relative to the manifest's directory.
Manifest load_manifest(const std::string &path);

InputOracle oracle_from_manifest(const Manifest &m);

std::string read_file(const std::string &path);

}  // namespace lsym

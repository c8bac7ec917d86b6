#include "lsym/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace lsym {

namespace {

std::string trim(const std::string &s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Manifest parse_manifest(const std::string &text) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  std::string section;  // current party, empty = top level
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[' && s.back() == ']') {
      std::string inner = trim(s.substr(1, s.size() - 2));
      if (inner.rfind("party ", 0) != 0)
        throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                 ": expected [party NAME]");
      section = trim(inner.substr(6));
      if (section.empty())
        throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                 ": empty party name");
      m.inputs[section];  // party may have no inputs
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("manifest line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (!section.empty()) {
      if (key != "inputs")
        throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                 ": unknown party key " + key);
      std::istringstream vs(val);
      int64_t x;
      while (vs >> x) m.inputs[section].push_back(x);
      if (!vs.eof())
        throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                 ": bad integer in inputs");
      continue;
    }
    if (key == "program") m.program = val;
    else if (key == "mode") m.mode = val;
    else if (key == "seed") m.seed = std::stoull(val);
    else if (key == "fuel") m.fuel = std::stoull(val);
    else if (key == "schedule") m.schedule = val;
    else
      throw std::runtime_error("manifest line " + std::to_string(lineno) +
                               ": unknown key " + key);
  }
  if (m.mode != "st" && m.mode != "ds-abstract" && m.mode != "ds-concrete")
    throw std::runtime_error("manifest: unknown mode " + m.mode);
  return m;
}

Manifest load_manifest(const std::string &path) {
  Manifest m = parse_manifest(read_file(path));
  if (!m.program.empty()) {
    std::filesystem::path p(m.program);
    if (p.is_relative())
      m.program = (std::filesystem::path(path).parent_path() / p).string();
  }
  return m;
}

InputOracle oracle_from_manifest(const Manifest &m) {
  InputOracle io;
  for (const auto &[A, xs] : m.inputs)
    io.inputs[A] = std::deque<int64_t>(xs.begin(), xs.end());
  return io;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace lsym

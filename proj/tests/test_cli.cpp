#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "lsym/manifest.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string &args) {
  std::string cmd = std::string(LSYM_CLI_PATH) + " " + args + " 2>&1";
  FILE *p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  CliResult r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::map<std::string, std::string> parse_kv(const std::string &text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

std::map<std::string, std::string> read_expected(const fs::path &p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_kv(os.str());
}

}  // namespace

TEST_CASE("every corpus entry matches its expected file in all three modes") {
  fs::path corpus(LSYM_CORPUS_DIR);
  size_t entries = 0;
  for (const auto &dir : fs::directory_iterator(corpus)) {
    if (!dir.is_directory()) continue;
    entries++;
    std::string name = dir.path().filename().string();
    auto want = read_expected(dir.path() / "expected");
    std::string manifest = (dir.path() / "manifest").string();
    bool terminal = want.at("outcome") == "terminal";

    CliResult st = run_cli("run --manifest " + manifest);
    auto got = parse_kv(st.out);
    INFO("entry " << name << " st output:\n" << st.out);
    CHECK(got["outcome"] == want["outcome"]);
    CHECK(st.exit_code == (terminal ? 0 : 1));
    if (want.count("st-value")) CHECK(got["st-value"] == want["st-value"]);
    if (want.count("st-rule"))
      CHECK(got["stuck"].rfind(want["st-rule"] + ":", 0) == 0);
    for (const auto &[k, v] : want)
      if (k.rfind("output ", 0) == 0) CHECK(got[k] == v);

    for (std::string mode : {"ds-abstract", "ds-concrete"}) {
      CliResult ds = run_cli("run --manifest " + manifest + " --mode " + mode +
                             " --schedule random --seed 5");
      auto dgot = parse_kv(ds.out);
      INFO("entry " << name << " " << mode << " output:\n" << ds.out);
      CHECK(dgot["outcome"] == want["outcome"]);
      CHECK(ds.exit_code == (terminal ? 0 : 1));
      if (want.count("ds-rule"))
        CHECK(dgot["stuck"].rfind(want["ds-rule"] + ":", 0) == 0);
      for (const auto &[k, v] : want) {
        if (k.rfind("value ", 0) == 0) CHECK(dgot[k] == v);
        if (k.rfind("output ", 0) == 0) CHECK(dgot[k] == v);
      }
    }
  }
  CHECK(entries >= 12);
}

TEST_CASE("st traces are byte-identical across runs") {
  fs::path corpus(LSYM_CORPUS_DIR);
  std::string manifest = (corpus / "millionaires" / "manifest").string();
  CliResult a = run_cli("trace --manifest " + manifest);
  CliResult b = run_cli("trace --manifest " + manifest);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\tST-") != std::string::npos);
}

TEST_CASE("check subcommand parses without running") {
  fs::path corpus(LSYM_CORPUS_DIR);
  CliResult r =
      run_cli("check " + (corpus / "millionaires" / "program.lsym").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("check ok") != std::string::npos);
  CHECK(r.out.find("principals = {A,B}") != std::string::npos);
}

TEST_CASE("exit codes: usage, parse, fuel") {
  CHECK(run_cli("run --bogus-flag").exit_code == 3);
  CHECK(run_cli("frobnicate").exit_code == 3);
  CHECK(run_cli("run /nonexistent.lsym").exit_code == 3);

  fs::path tmp = fs::temp_directory_path() / "lsym_cli_test";
  fs::create_directories(tmp);
  {
    std::ofstream f(tmp / "bad.lsym");
    f << "principal A\ndef main = let x = in 3\n";
  }
  CHECK(run_cli("run " + (tmp / "bad.lsym").string()).exit_code == 1);

  {
    std::ofstream f(tmp / "loop.lsym");
    f << "principal A\ndef main = let w = fun [w] x -> w x in w 0\n";
  }
  CliResult r = run_cli("run " + (tmp / "loop.lsym").string() + " --fuel 100");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("out-of-fuel") != std::string::npos);
}

TEST_CASE("flags override manifest settings") {
  fs::path corpus(LSYM_CORPUS_DIR);
  std::string manifest = (corpus / "gcd" / "manifest").string();
  CliResult r = run_cli("run --manifest " + manifest + " --fuel 50");
  CHECK(r.exit_code == 2);
}

TEST_CASE("scripted schedules run from a file") {
  fs::path tmp = fs::temp_directory_path() / "lsym_cli_test";
  fs::create_directories(tmp);
  {
    std::ofstream f(tmp / "sched.txt");
    f << "A B B A\n";
  }
  fs::path corpus(LSYM_CORPUS_DIR);
  CliResult r = run_cli("run --manifest " +
                        (corpus / "millionaires" / "manifest").string() +
                        " --mode ds-abstract --schedule scripted:" +
                        (tmp / "sched.txt").string());
  CHECK(r.exit_code == 0);
  auto kv = parse_kv(r.out);
  CHECK(kv["outcome"] == "terminal");
  CHECK(kv["output A"] == "1");
}

TEST_CASE("manifest parsing") {
  using namespace lsym;
  Manifest m = parse_manifest("# comment\n"
                              "program = x.lsym\n"
                              "mode = ds-abstract\n"
                              "seed = 9\n"
                              "fuel = 123\n"
                              "schedule = random\n"
                              "[party A]\n"
                              "inputs = 1 2 3\n"
                              "[party B]\n");
  CHECK(m.program == "x.lsym");
  CHECK(m.mode == "ds-abstract");
  CHECK(m.seed == 9);
  CHECK(m.fuel == 123);
  CHECK(m.schedule == "random");
  CHECK(m.inputs.at("A") == std::vector<int64_t>({1, 2, 3}));
  CHECK(m.inputs.at("B").empty());

  CHECK_THROWS(parse_manifest("mode = nonsense\n"));
  CHECK_THROWS(parse_manifest("mode = st\nbogus = 1\n"));
  CHECK_THROWS(parse_manifest("mode = st\n[party A]\nfuel = 1\n"));
}

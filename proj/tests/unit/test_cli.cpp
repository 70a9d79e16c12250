#include <doctest.h>

#ifdef FOLDSKIT_HAVE_CLI

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "../../tools/cli/cli.hpp"
#include "foldskit/builtins.hpp"

using namespace folds;
using nlohmann::json;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args, int* code = nullptr) {
  args.insert(args.begin(), {"--format", "json"});
  auto o = run(args);
  if (code) *code = o.code;
  return json::parse(o.out);
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::string theory_for(const std::string& sig) {
  if (sig == "cat+E") return "cat_axioms";
  if (sig == "dagger") return "dagger_axioms";
  return "";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("univalence examples") {
  auto lin = run({"univalence", "linear-order-3"});
  CHECK(lin.code == cli::kOk);
  CHECK(contains(lin.out, "univalent: true"));

  auto iso = run({"univalence", "walking-iso"});
  CHECK(iso.code == cli::kFalse);
  CHECK(contains(iso.out, "sort O, pair (a,b)"));

  auto per = run({"univalence", "z2", "--per-sort"});
  CHECK(per.code == cli::kFalse);
}

TEST_CASE("indiscernibility counts") {
  auto o = run({"indisc", "dagger-Z4", "--sort", "O", "--pair", "*,*"});
  CHECK(o.code == cli::kOk);
  CHECK(contains(o.out, "count: 2"));
  auto inv = run_json({"indisc", "dagger-Z4-inv", "--sort", "O", "--pair", "*,*"});
  CHECK(inv["result"]["count"] == 4);
  auto e = run_json({"indisc", "total-E", "--sort", "A", "--pair", "f,g"});
  CHECK(e["result"]["count"] == 1);
  auto listed = run_json({"indisc", "z2", "--sort", "O", "--pair", "*,*", "--list"});
  CHECK(listed["result"]["indiscernibilities"].size() == 2);
}

TEST_CASE("theories, morphisms and hsip") {
  CHECK(run({"check", "z2", "--theory", "cat_axioms"}).code == cli::kOk);
  CHECK(run({"check", "dagger-Z4-inv", "--theory", "dagger_axioms"}).code == cli::kOk);

  auto hom = run_json({"hom", "walking-arrow", "walking-arrow", "--all"});
  CHECK(hom["result"]["count"] == 3);
  CHECK(run({"hom", "walking-arrow", "walking-arrow"}).code == cli::kInputError);
  CHECK(run({"hom", "walking-arrow", "walking-arrow", "--iso", "--sse"}).code == cli::kInputError);

  auto h = run({"hsip", "rel-M", "rel-N"});
  CHECK(h.code == cli::kFalse);
  CHECK(contains(h.out, "hypothesis not met: M not univalent"));
  CHECK(run({"hsip", "linear-order-3", "linear-order-3"}).code == cli::kOk);
}

TEST_CASE("derive writes a parseable signature") {
  auto path = std::filesystem::temp_directory_path() / "foldskit_cli_derive.fsig";
  auto o = run({"derive", "rg", "--family", "O={a,b}", "--out", path.string()});
  CHECK(o.code == cli::kOk);
  CHECK(run({"validate", path.string()}).code == cli::kOk);
  std::filesystem::remove(path);

  auto j = run_json({"derive", "rg", "--family", "O={a,b}"});
  CHECK(j["status"] == "ok");
}

TEST_CASE("input errors exit 2 with diagnostics") {
  auto o = run({"validate", "no-such-thing"});
  CHECK(o.code == cli::kInputError);
  CHECK(contains(o.err, "error:"));
  CHECK(run({"indisc", "z2", "--sort", "Q", "--pair", "*,*"}).code == cli::kInputError);
  CHECK(run({"indisc", "z2", "--sort", "O", "--pair", "*,nope"}).code == cli::kInputError);
  CHECK(run({"frobnicate"}).code == cli::kInputError);

  auto path = std::filesystem::temp_directory_path() / "foldskit_cli_bad.fsig";
  std::ofstream(path) << "signature B {\n  sort O rank 0\n  sort A rank 1 { d: P }\n}\n";
  int code = 0;
  auto j = run_json({"validate", path.string()}, &code);
  CHECK(code == cli::kInputError);
  CHECK(j["status"] == "error");
  REQUIRE(!j["diagnostics"].empty());
  CHECK(j["diagnostics"][0]["span"]["line"] == 3);
  std::filesystem::remove(path);
}

TEST_CASE("budgets") {
  auto j = run_json({"--budget", "5", "indisc", "z2", "--sort", "O", "--pair", "*,*"});
  CHECK(j["status"] == "budget-exhausted");
  CHECK(j["exit_code"] == cli::kBudgetExhausted);

  ::setenv("FOLDSKIT_BUDGET", "5", 1);
  auto env = run({"indisc", "z2", "--sort", "O", "--pair", "*,*"});
  ::unsetenv("FOLDSKIT_BUDGET");
  CHECK(env.code == cli::kBudgetExhausted);
  CHECK(run({"indisc", "z2", "--sort", "O", "--pair", "*,*"}).code == cli::kOk);
}

TEST_CASE("builtin listing and dumps") {
  auto list = run({"builtin", "--list"});
  CHECK(list.code == cli::kOk);
  CHECK(contains(list.out, "signature cat+E"));
  auto dump = run({"builtin", "--dump", "rg"});
  CHECK(dump.out == builtin_text(AssetKind::signature, "rg"));
}

TEST_CASE("envelope shape") {
  auto j = run_json({"univalence", "z2"});
  CHECK(j["schema"] == cli::kSchemaVersion);
  CHECK(j.contains("command"));
  CHECK(j.contains("result"));
  CHECK(j["diagnostics"].is_array());
  CHECK(j["exit_code"] == cli::kFalse);
}

TEST_CASE("text and JSON agree on every shipped structure") {
  for (const auto& name : builtin_names(AssetKind::structure)) {
    auto m = builtin_structure(name);
    std::vector<std::vector<std::string>> commands = {{"validate", name}, {"univalence", name}};
    auto theory = theory_for(m->signature().name());
    if (!theory.empty()) commands.push_back({"check", name, "--theory", theory});
    commands.push_back({"hsip", name, name});
    const auto& s = m->signature();
    for (auto k : s.sorts_of_rank(0)) {
      if (m->size(k) == 0) continue;
      const auto& a = m->element_name(k, 0);
      const auto& b = m->element_name(k, static_cast<ElemId>(m->size(k) - 1));
      commands.push_back({"indisc", name, "--sort", s.sort_name(k), "--pair", a + "," + b});
    }
    for (const auto& cmd : commands) {
      auto text = run(cmd);
      int code = -1;
      auto j = run_json(cmd, &code);
      CHECK_MESSAGE(text.code == code, name << " " << cmd[0]);
      CHECK(j["exit_code"] == code);
      if (j["result"].contains("verdict")) CHECK(j["result"]["verdict"] == (code == cli::kOk));
      // Deterministic output.
      CHECK(run(cmd).out == text.out);
    }
  }
}

}  // TEST_SUITE

#endif

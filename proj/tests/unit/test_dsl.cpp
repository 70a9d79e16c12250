#include <doctest.h>

#include <functional>
#include <sstream>

#include "foldskit/builtins.hpp"
#include "foldskit/catalog.hpp"
#include "foldskit/dsl.hpp"

using namespace folds;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  if (out.empty()) out.emplace_back();
  return out;
}

/// Every span must point at characters of the input (or one past the end
/// of a line, for errors at end of input).
bool spans_inside(const InputError& err, const std::string& text) {
  auto lines = lines_of(text);
  for (const auto& d : err.diagnostics()) {
    if (!d.span) continue;
    const auto& s = *d.span;
    if (!s.valid() || s.line > lines.size()) return false;
    if (s.column > lines[s.line - 1].size() + 1) return false;
  }
  return true;
}

std::string first_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const InputError& err) {
    return err.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("dsl") {

TEST_CASE("shipped assets round trip") {
  for (auto name : builtin_names(AssetKind::signature)) {
    auto sig = builtin_signature(name);
    auto parsed = parse_signature(builtin_text(AssetKind::signature, name));
    CHECK(parsed == *sig);
    CHECK(parse_signature(serialize(*sig)) == *sig);
    CHECK(serialize(parse_signature(serialize(*sig))) == serialize(*sig));
  }
  for (auto name : builtin_names(AssetKind::structure)) {
    auto m = builtin_structure(name);
    CHECK(parse_structure(serialize(*m), m->signature_ptr()) == *m);
  }
  for (auto name : builtin_names(AssetKind::theory)) {
    auto t = builtin_theory(name);
    auto again = parse_theory(serialize(*t), t->sig);
    REQUIRE(again.axioms.size() == t->axioms.size());
    for (std::size_t i = 0; i < t->axioms.size(); ++i) {
      CHECK(again.axioms[i].name == t->axioms[i].name);
      CHECK(same_formula(*again.axioms[i].formula, *t->axioms[i].formula));
    }
  }
}

TEST_CASE("random signatures and structures round trip") {
  gen::Rng rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 6));
    auto text = serialize(*sig);
    auto back = parse_signature(text);
    CHECK(back == *sig);
    CHECK(serialize(back) == text);
    auto m = gen::random_structure(rng, sig, 3);
    CHECK(parse_structure(serialize(m), sig) == m);
  }
}

TEST_CASE("the shipped cat+E text is the builtin") {
  auto parsed = parse_signature(builtin_text(AssetKind::signature, "cat+E"));
  CHECK(parsed.sort_count() == 5);
  CHECK(builtin_signature("rg")->sort_count() == 3);
  auto mc = builtin_signature("multicat2");
  for (auto s : {"O", "A0", "A1", "A2", "E0", "E1", "E2"}) CHECK(mc->find_sort(s));
}

TEST_CASE("empty signature") {
  auto s = parse_signature("signature X { }");
  CHECK(s.sort_count() == 0);
  CHECK(s.height() == 0);
  CHECK(s.name() == "X");
}

TEST_CASE("CRLF and comments") {
  std::string text = "// reflexive graphs\r\nsignature G {\r\n  sort O rank 0\r\n"
                     "  sort A rank 1 { d: O, c: O } // arrows\r\n}\r\n";
  auto s = parse_signature(text);
  CHECK(s.sort_count() == 2);
  CHECK(serialize(s).find('\r') == std::string::npos);
}

TEST_CASE("endpoint errors are located") {
  std::string text =
      "signature B {\n  sort O rank 0\n  sort A rank 1 { d: O, c: O }\n"
      "  sort I rank 2 { i: A }\n  sort T rank 2 { t0: A }\n  eq c.t0 = d.i\n}\n";
  try {
    parse_signature(text);
    FAIL("expected an error");
  } catch (const InputError& err) {
    REQUIRE(!err.diagnostics().empty());
    const auto& d = err.diagnostics().front();
    REQUIRE(d.span);
    CHECK(d.span->line == 6);
    CHECK(spans_inside(err, text));
  }
}

TEST_CASE("missing generators are named") {
  auto sig = builtin_signature("rg");
  auto msg = first_message([&] {
    parse_structure("structure S over rg {\n  O = { x }\n  A = { f (d=x) }\n}\n", sig);
  });
  CHECK(msg.find("'c'") != std::string::npos);
}

TEST_CASE("theories parse and elaborate") {
  auto sig = builtin_signature("cat+E");
  auto t = parse_theory(builtin_text(AssetKind::theory, "cat_axioms"), sig);
  CHECK(t.axioms.size() == 7);
  auto std_e = parse_theory(
      "theory s over \"cat+E\" {\n  axiom e_std: forall x y : O, forall f g : A(d=x,c=y), "
      "E(e1=f,e2=g) <-> f == g\n}\n",
      sig);
  CHECK(std_e.axioms.size() == 1);

  // Type errors carry spans into the text.
  std::string bad = "theory s over \"cat+E\" {\n  axiom oops: forall x : O, forall f : A(d=x, c=x),\n"
                    "    T(t0=f, t1=f, t2=x)\n}\n";
  try {
    parse_theory(bad, sig);
    FAIL("expected an error");
  } catch (const InputError& err) {
    CHECK(spans_inside(err, bad));
    REQUIRE(err.diagnostics().front().span);
    CHECK(err.diagnostics().front().span->line >= 2);
  }
}

TEST_CASE("error spans stay inside mangled input") {
  gen::Rng rng(72);
  std::vector<std::string> sources;
  for (auto kind : {AssetKind::signature, AssetKind::structure, AssetKind::theory})
    for (auto name : builtin_names(kind)) sources.push_back(builtin_text(kind, name));
  const std::string junk = "{}(),:=.;\"@#-> x9";
  std::size_t errors = 0;
  for (int trial = 0; trial < 600; ++trial) {
    std::string text = sources[trial % sources.size()];
    std::uniform_int_distribution<std::size_t> pos(0, text.size() - 1);
    for (int edit = 0; edit < 3; ++edit) {
      std::size_t p = pos(rng);
      switch (rng() % 3) {
        case 0: text.erase(p, 1); break;
        case 1: text.insert(p, 1, junk[rng() % junk.size()]); break;
        default: text[p] = junk[rng() % junk.size()]; break;
      }
      pos = std::uniform_int_distribution<std::size_t>(0, text.size() - 1);
    }
    try {
      auto header = parse_header(text);
      switch (header.kind) {
        case DslHeader::Kind::signature: parse_signature(text); break;
        case DslHeader::Kind::structure:
          parse_structure(text, builtin_signature(header.over));
          break;
        case DslHeader::Kind::theory: parse_theory(text, builtin_signature(header.over)); break;
      }
    } catch (const InputError& err) {
      ++errors;
      CHECK(spans_inside(err, text));
    } catch (const std::exception&) {
      // An unknown builtin name after mangling the header.
    }
  }
  CHECK(errors > 300);
}

TEST_CASE("serialization is deterministic") {
  for (auto name : builtin_names(AssetKind::structure)) {
    auto a = serialize(*builtin_structure(name));
    auto b = serialize(*builtin_structure(name));
    CHECK(a == b);
  }
  gen::Rng r1(73), r2(73);
  for (int i = 0; i < 20; ++i)
    CHECK(serialize(gen::random_signature(r1)) == serialize(gen::random_signature(r2)));
}

TEST_CASE("names are quoted only when needed") {
  CHECK(format_name("abc") == "abc");
  CHECK(format_name("cat+E") == "\"cat+E\"");
  CHECK(format_name("A(a,b)") == "\"A(a,b)\"");
}

}  // TEST_SUITE

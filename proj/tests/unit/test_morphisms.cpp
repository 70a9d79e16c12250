#include <doctest.h>

#include "foldskit/builtins.hpp"
#include "foldskit/catalog.hpp"
#include "foldskit/indiscernibility.hpp"
#include "foldskit/morphisms.hpp"
#include "oracles.hpp"

using namespace folds;

namespace {

const Structure& trivial() {
  static const Structure m = category_from_table(cyclic_group(1));
  return m;
}

std::optional<StructureMorphism> unique_morphism(const Structure& m, const Structure& n) {
  auto all = enumerate_morphisms(m, n);
  if (all.size() != 1) return std::nullopt;
  return all.front();
}

}  // namespace

TEST_SUITE("morphisms") {

TEST_CASE("identities and group homomorphisms are natural") {
  auto z2 = category_from_table(cyclic_group(2, {"e", "g"}));
  CHECK(validate_morphism(z2, z2, identity_morphism(z2)).ok());
  auto all = enumerate_morphisms(z2, z2);
  CHECK(std::find(all.begin(), all.end(), identity_morphism(z2)) != all.end());
}

TEST_CASE("naturality violations are reported") {
  auto m = category_from_table(walking_arrow());
  auto f = identity_morphism(m);
  SortId a = m.signature().sort("A");
  f.maps[a][m.element(a, "f")] = m.element(a, "1a");
  auto r = validate_morphism(m, m, f);
  CHECK_FALSE(r.ok());
}

TEST_CASE("endofunctors of the walking arrow") {
  auto m = category_from_table(walking_arrow());
  CHECK(enumerate_morphisms(m, m).size() == 3);
  CHECK(oracle::brute_morphisms(m, m) == 3);
}

TEST_CASE("no morphisms into an empty carrier") {
  auto m = category_from_table(walking_arrow());
  Structure empty(m.signature_ptr(), "empty", {}, {});
  CHECK(enumerate_morphisms(m, empty).empty());
  CHECK(enumerate_morphisms(empty, m).size() == 1);
}

TEST_CASE("agreement with the exhaustive oracle") {
  gen::Rng rng(51);
  for (int trial = 0; trial < 150; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 4));
    auto m = gen::random_structure(rng, sig, 2);
    auto n = gen::random_structure(rng, sig, 3);
    auto all = enumerate_morphisms(m, n);
    CHECK(all.size() == oracle::brute_morphisms(m, n));
    for (const auto& f : all) CHECK(validate_morphism(m, n, f).ok());
  }
  for (const auto& t : category_catalog()) {
    // The oracle tries every function on T, which has |arrows|^2 elements.
    if (t.arrows.size() > 2) continue;
    auto m = category_from_table(t);
    CHECK_MESSAGE(enumerate_morphisms(m, m).size() == oracle::brute_morphisms(m, m), t.name);
  }
}

TEST_CASE("isomorphisms and their inverses") {
  auto iso = category_from_table(walking_iso());
  CHECK(is_iso(iso, iso, identity_morphism(iso)));
  auto collapse = unique_morphism(iso, trivial());
  REQUIRE(collapse);
  CHECK_FALSE(is_iso(iso, trivial(), *collapse));
  CHECK_FALSE(inverse_morphism(iso, trivial(), *collapse));

  gen::Rng rng(52);
  for (int trial = 0; trial < 60; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 4));
    auto m = gen::random_structure(rng, sig, 3);
    auto [copy, f] = gen::shuffled_copy(rng, m);
    REQUIRE(validate_morphism(m, copy, f).ok());
    CHECK(is_iso(m, copy, f));
    auto g = inverse_morphism(m, copy, f);
    REQUIRE(g);
    CHECK(validate_morphism(copy, m, *g).ok());
    CHECK(compose(f, *g) == identity_morphism(m));
    CHECK(compose(*g, f) == identity_morphism(copy));
    CHECK(is_sse(m, copy, f));
    CHECK(is_equivalence(m, copy, f));
  }
}

TEST_CASE("split surjective equivalences") {
  auto iso = category_from_table(walking_iso());
  auto collapse = unique_morphism(iso, trivial());
  REQUIRE(collapse);
  CHECK(is_sse(iso, trivial(), *collapse));
  CHECK(is_equivalence(iso, trivial(), *collapse));

  // A proper full subcategory is not surjective on objects.
  auto lin2 = category_from_table(linear_order(2));
  auto lin3 = category_from_table(linear_order(3));
  for (const auto& f : enumerate_morphisms(lin2, lin3)) CHECK_FALSE(is_sse(lin2, lin3, f));

  // A surjection on objects that misses an arrow fiber fails one level up.
  auto pair = category_from_table(parallel_pair());
  auto arrow = category_from_table(walking_arrow());
  for (const auto& f : enumerate_morphisms(arrow, pair)) CHECK_FALSE(is_sse(arrow, pair, f));
}

TEST_CASE("the trivial category into the walking iso is an equivalence, not an sse") {
  auto iso = category_from_table(walking_iso());
  auto all = enumerate_morphisms(trivial(), iso);
  REQUIRE(all.size() == 2);
  for (const auto& f : all) {
    CHECK_FALSE(is_sse(trivial(), iso, f));
    CHECK(is_equivalence(trivial(), iso, f));
  }
}

TEST_CASE("sse implies equivalence; both close under composition") {
  std::vector<Structure> cats;
  for (const auto& t : category_catalog())
    if (t.arrows.size() <= 4) cats.push_back(category_from_table(t));
  std::size_t seen = 0;
  for (const auto& m : cats) {
    for (const auto& n : cats) {
      for (const auto& f : enumerate_morphisms(m, n, kDefaultBudget, 50)) {
        bool sse = is_sse(m, n, f);
        if (sse) CHECK(is_equivalence(m, n, f));
        if (is_iso(m, n, f)) CHECK(sse);
        if (!sse) continue;
        for (const auto& p : cats) {
          for (const auto& g : enumerate_morphisms(n, p, kDefaultBudget, 10)) {
            if (!is_sse(n, p, g)) continue;
            auto gf = compose(f, g);
            CHECK(validate_morphism(m, p, gf).ok());
            CHECK(is_sse(m, p, gf));
            CHECK(is_iso(m, p, gf) == (is_iso(m, n, f) && is_iso(n, p, g)));
            ++seen;
          }
        }
      }
    }
  }
  CHECK(seen > 20);
}

TEST_CASE("relative equivalence along the identity is the absolute notion") {
  auto iso = category_from_table(walking_iso());
  auto id = SigMorphism::identity(iso.signature_ptr());
  for (const auto& f : enumerate_morphisms(trivial(), iso))
    CHECK(is_equivalence_rel(id, trivial(), iso, f) == is_equivalence(trivial(), iso, f));
  auto lin = category_from_table(linear_order(2));
  for (const auto& f : enumerate_morphisms(lin, iso))
    CHECK(is_equivalence_rel(id, lin, iso, f) == is_equivalence(lin, iso, f));
}

TEST_CASE("morphisms need not preserve indiscernibility") {
  auto m = relation_m();
  auto n = relation_n();
  auto f = relation_inclusion();
  REQUIRE(validate_morphism(m, n, f).ok());
  SortId a = m.signature().sort("A");
  CHECK(count_indiscernibilities(m, a, 0, 1) > 0);
  CHECK(count_indiscernibilities(n, a, f.maps[a][0], f.maps[a][1]) == 0);
}

TEST_CASE("indiscernibility in the codomain reflects along pulled back morphisms") {
  gen::Rng rng(53);
  std::size_t checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 4));
    if (sig->height() < 2) continue;
    auto n = gen::random_structure(rng, sig, 3);
    auto m0 = gen::random_family(rng, *sig, 3);
    auto f0 = gen::random_family_map(rng, SigMorphism::identity(sig), m0, bottom_family(n));
    if (!f0) continue;
    auto pb = gen::pullback_along_bottom(n, m0, *f0);
    REQUIRE(validate_morphism(pb.m, n, pb.f).ok());
    for (auto k : sig->sorts_of_rank(0)) {
      for (ElemId x = 0; x < pb.m.size(k); ++x) {
        for (ElemId y = 0; y < pb.m.size(k); ++y) {
          if (count_indiscernibilities(n, k, pb.f.maps[k][x], pb.f.maps[k][y], 1) == 0) continue;
          CHECK(count_indiscernibilities(pb.m, k, x, y, 1) == 1);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("hsip examples") {
  auto lin = category_from_table(linear_order(3));
  auto r = hsip_check(lin, lin);
  CHECK(r.applicable);
  CHECK(r.ok());
  CHECK(r.sse == r.isos);

  auto iso = category_from_table(walking_iso());
  auto h = hsip_check(iso, trivial());
  CHECK_FALSE(h.applicable);
  CHECK(h.note.find("hypothesis not met: M not univalent") != std::string::npos);

  auto disc = category_from_table(discrete_category(2));
  auto d = hsip_check(disc, disc);
  CHECK(d.applicable);
  CHECK(d.ok());
  CHECK(d.sse == 2);
  CHECK(d.isos == 2);

  for (const auto& [name, m] : shipped_structures()) {
    if (m.signature().name() == "multicat2") continue;
    auto self = hsip_check(m, m);
    CHECK_MESSAGE(self.ok(), name);
  }
}

TEST_CASE("format lists every sort") {
  auto m = category_from_table(walking_arrow());
  auto text = format_morphism(m, m, identity_morphism(m));
  CHECK(text.find("O:") != std::string::npos);
  CHECK(text.find("T:") != std::string::npos);
}

}  // TEST_SUITE

#include <doctest.h>

#include <algorithm>

#include "foldskit/builtins.hpp"
#include "foldskit/catalog.hpp"
#include "foldskit/derivation.hpp"

using namespace folds;

namespace {

std::vector<std::string> sort_names(const Signature& s, std::size_t rank) {
  std::vector<std::string> out;
  for (auto k : s.sorts_of_rank(rank)) out.push_back(s.sort_name(k));
  return out;
}

std::vector<std::string> carrier(const Structure& m, const std::string& sort) {
  return m.elements(m.signature().sort(sort));
}

// Same carriers and actions, read through element names.
bool same_by_name(const Structure& x, const Structure& y) {
  const auto& s = x.signature();
  for (SortId k = 0; k < s.sort_count(); ++k) {
    auto a = x.elements(k), b = y.elements(k);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return false;
  }
  for (GenId g = 0; g < s.generator_count(); ++g) {
    auto src = s.generator(g).source, dst = s.generator(g).target;
    for (ElemId e = 0; e < x.size(src); ++e) {
      auto ey = y.element(src, x.element_name(src, e));
      if (x.element_name(dst, x.act(g, e)) != y.element_name(dst, y.act(g, ey))) return false;
    }
  }
  return true;
}

FamilyMap identity_map(const BottomFamily& fam) {
  FamilyMap f(fam.members.size());
  for (std::size_t k = 0; k < fam.members.size(); ++k)
    for (ElemId e = 0; e < fam.members[k].size(); ++e) f[k].push_back(e);
  return f;
}

}  // namespace

TEST_SUITE("derivation") {

TEST_CASE("reflexive graphs over two points") {
  auto rg = builtin_signature("rg");
  auto d = derive_signature(rg, parse_family(*rg, "O={a,b}"));
  CHECK(sort_names(*d->sig, 0) ==
        std::vector<std::string>{"A(a,a)", "A(a,b)", "A(b,a)", "A(b,b)"});
  CHECK(sort_names(*d->sig, 1) == std::vector<std::string>{"I(a)", "I(b)"});
  const auto& s = *d->sig;
  auto i = s.sort("I(b)");
  REQUIRE(s.generators_of(i).size() == 1);
  CHECK(s.generator(s.generators_of(i)[0]).target == s.sort("A(b,b)"));
  CHECK(d->sig->height() == rg->height() - 1);
}

TEST_CASE("a height-one signature derives to the empty signature") {
  auto bin = builtin_signature("binrel");
  auto h1 = std::make_shared<const Signature>(Signature::from_decl(
      {"pts", {{"P", 0, {}, {}}, {"Q", 0, {}, {}}}, {}, std::nullopt}));
  auto d = derive_signature(h1, parse_family(*h1, "P={x,y};Q={z}"));
  CHECK(d->sig->sort_count() == 0);
  CHECK(d->sig->height() == 0);
  (void)bin;
}

TEST_CASE("categories over one object") {
  auto cat = builtin_signature("cat");
  auto d = derive_signature(cat, parse_family(*cat, "O={x}"));
  CHECK(sort_names(*d->sig, 0) == std::vector<std::string>{"A(x,x)"});
  CHECK(sort_names(*d->sig, 1).size() == 2);
}

TEST_CASE("missing family sorts are rejected") {
  auto rg = builtin_signature("rg");
  BottomFamily fam;  // no entry for O
  CHECK_THROWS_AS(derive_signature(rg, fam), InputError);
}

TEST_CASE("derived carriers of the walking arrow") {
  auto m = category_from_table(walking_arrow());
  auto ds = derive_structure(m);
  CHECK(carrier(*ds.structure, "A(a,b)") == std::vector<std::string>{"f"});
  CHECK(carrier(*ds.structure, "A(b,a)").empty());
  CHECK(validate_structure(*ds.structure).ok());

  std::size_t total = 0;
  for (auto k : ds.dsig->sig->sorts_of_rank(0)) total += ds.structure->size(k);
  CHECK(total == m.size(m.signature().sort("A")));
}

TEST_CASE("deriving twice leaves bare families") {
  auto m = category_from_table(cyclic_group(2, {"e", "g"}));
  auto once = derive_structure(m);
  auto twice = derive_structure(*once.structure);
  CHECK(twice.dsig->sig->height() == 1);
  for (SortId k = 0; k < twice.dsig->sig->sort_count(); ++k)
    CHECK(twice.dsig->sig->rank(k) == 0);
}

TEST_CASE("joker extension") {
  auto rg = builtin_signature("rg");
  auto fam = parse_family(*rg, "O={a,b}");
  auto o = rg->sort("O");
  auto [ext, joker] = joker_extend(*rg, fam, o);
  CHECK(ext.members[o] == std::vector<std::string>{"a", "b", kJoker});
  CHECK(joker == 2);
  auto [ext2, joker2] = joker_extend(*rg, ext, o);
  CHECK(ext2.members[o].size() == 4);
  CHECK(ext2.members[o][joker2] != ext2.members[o][joker]);
}

TEST_CASE("partial structures") {
  auto iso = category_from_table(walking_iso());
  auto o = iso.signature().sort("O");
  auto pa = partial_structure(iso, o, iso.element(o, "a"));
  CHECK(carrier(pa, "A(★,b)") == std::vector<std::string>{"f"});

  // Joker-free derived sorts agree with the derived structure on the nose.
  auto ds = derive_structure(iso);
  const auto& dsig = *ds.dsig->sig;
  for (SortId k = 0; k < dsig.sort_count(); ++k) {
    auto in_partial = pa.signature().find_sort(dsig.sort_name(k));
    REQUIRE(in_partial);
    CHECK(pa.elements(*in_partial) == ds.structure->elements(k));
  }

  auto z2 = category_from_table(cyclic_group(2, {"e", "g"}));
  auto pz = partial_structure(z2, o, 0);
  CHECK(carrier(pz, "A(★,★)") == std::vector<std::string>{"e", "g"});
}

TEST_CASE("partial structure agrees with the pullback along <1,a>") {
  auto cat_axioms_models = std::vector<Structure>{
      category_from_table(walking_iso()), category_from_table(parallel_pair()),
      category_from_table(cyclic_group(3)), category_from_table(linear_order(3))};
  for (const auto& m : cat_axioms_models) {
    const auto& s = m.signature();
    SortId o = s.sort("O");
    auto ds = derive_structure(m);
    auto [ext, joker] = joker_extend(s, ds.dsig->family, o);
    auto jokered = derive_signature(m.signature_ptr(), ext);
    for (ElemId a = 0; a < m.size(o); ++a) {
      FamilyMap h = identity_map(ext);
      h[o][joker] = a;
      auto dm = derived_morphism(SigMorphism::identity(m.signature_ptr()), *jokered, *ds.dsig, h);
      CHECK(is_discrete_opfibration(dm));
      auto pulled = pullback_structure(dm, *ds.structure);
      auto direct = partial_structure(*jokered, m, o, joker, a);
      CHECK(pulled == direct);

      // ι then <1,a> returns the derived structure itself.
      FamilyMap incl = identity_map(ds.dsig->family);
      auto iota = derived_morphism(SigMorphism::identity(m.signature_ptr()), *ds.dsig, *jokered, incl);
      CHECK(is_discrete_opfibration(iota));
      auto back = pullback_structure(iota, pulled);
      CHECK(back == *ds.structure);
    }
  }
}

TEST_CASE("pullback functor laws") {
  gen::Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 4));
    auto n = gen::random_structure(rng, sig, 3);
    auto id = SigMorphism::identity(sig);
    CHECK(pullback_structure(id, n) == n);

    auto r = gen::renaming(sig);
    auto inc = gen::down_closed_inclusion(rng, sig);
    REQUIRE(inc.validate().ok());
    // inc: S -> sig, r: sig -> sig'. Pull back a structure over sig'.
    auto over_renamed = pullback_structure(
        SigMorphism{r.target, r.source,
                    [&] {
                      std::vector<SortId> inv(r.sort_map.size());
                      for (SortId k = 0; k < r.sort_map.size(); ++k) inv[r.sort_map[k]] = k;
                      return inv;
                    }(),
                    [&] {
                      std::vector<Arrow> inv(r.gen_map.size());
                      for (GenId g = 0; g < r.gen_map.size(); ++g) {
                        auto target_gen = r.target->representative(r.gen_map[g]).steps.at(0);
                        inv[target_gen] = sig->generator_arrow(g);
                      }
                      return inv;
                    }()},
        n);
    auto composite = pullback_structure(inc.then(r), over_renamed);
    auto stepwise = pullback_structure(inc, pullback_structure(r, over_renamed));
    CHECK(composite == stepwise);
  }
}

TEST_CASE("derived morphisms: identity and composition") {
  gen::Rng rng(32);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 4));
    if (sig->height() < 2) continue;
    auto fa = gen::random_family(rng, *sig, 2);
    auto fb = gen::random_family(rng, *sig, 2);
    auto fc = gen::random_family(rng, *sig, 2);
    auto id = SigMorphism::identity(sig);
    auto da = derive_signature(sig, fa);
    auto db = derive_signature(sig, fb);
    auto dc = derive_signature(sig, fc);

    auto did = derived_morphism(id, *da, *da, identity_map(fa));
    CHECK(did == SigMorphism::identity(da->sig));

    auto h1 = gen::random_family_map(rng, id, fa, fb);
    auto h2 = gen::random_family_map(rng, id, fb, fc);
    if (!h1 || !h2) continue;
    FamilyMap h12(h1->size());
    for (std::size_t k = 0; k < h1->size(); ++k)
      for (auto e : (*h1)[k]) h12[k].push_back((*h2)[k][e]);
    auto d1 = derived_morphism(id, *da, *db, *h1);
    auto d2 = derived_morphism(id, *db, *dc, *h2);
    auto d12 = derived_morphism(id.then(id), *da, *dc, h12);
    CHECK(d1.then(d2) == d12);
    CHECK(is_discrete_opfibration(d1));
    ++checked;

    // Renaming isomorphisms compose with the fold map.
    auto r = gen::renaming(sig);
    CHECK(is_discrete_opfibration(r));
    CHECK(is_discrete_opfibration(r.then(SigMorphism::identity(r.target))));
  }
  CHECK(checked > 10);
}

TEST_CASE("opfibrations compose and cancel on the left") {
  gen::Rng rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 4));
    auto r = gen::renaming(sig);
    auto inc = gen::down_closed_inclusion(rng, sig);
    // Down-closed inclusions and isomorphisms are opfibrations.
    CHECK(is_discrete_opfibration(inc));
    CHECK(is_discrete_opfibration(r));
    CHECK(is_discrete_opfibration(inc.then(r)));
    // G∘F and G opfibrations => F opfibration.
    if (is_discrete_opfibration(inc.then(r)) && is_discrete_opfibration(r))
      CHECK(is_discrete_opfibration(inc));
  }
}

TEST_CASE("the codiagonal is not an opfibration once fanouts are nonempty") {
  auto rg = builtin_signature("rg");
  auto f = gen::fold(rg);
  CHECK(f.validate().ok());
  // Fanout of A_1 maps bijectively onto fanout of A; the fold is an opfibration.
  CHECK(is_discrete_opfibration(f));

  // Collapsing the two rank-0 sorts of a signature whose rank-1 sort reads
  // one generator from each breaks the fanout bijection of that sort's image.
  auto two = std::make_shared<const Signature>(Signature::from_decl(
      {"two", {{"P", 0, {}, {}}, {"Q", 0, {}, {}}, {"R", 1, {{"p", "P", {}}, {"q", "Q", {}}}, {}}},
       {}, std::nullopt}));
  auto one = std::make_shared<const Signature>(Signature::from_decl(
      {"one", {{"P", 0, {}, {}}, {"R", 1, {{"p", "P", {}}}, {}}}, {}, std::nullopt}));
  SigMorphism collapse{two, one, {0, 0, 1}, {}};
  collapse.gen_map = {one->generator_arrow(0), one->generator_arrow(0)};
  CHECK(collapse.validate().ok());
  CHECK_FALSE(is_discrete_opfibration(collapse));
}

TEST_CASE("the joker-free inclusion on reflexive graphs is an opfibration") {
  auto rg = builtin_signature("rg");
  auto fam = parse_family(*rg, "O={a,b}");
  auto [ext, joker] = joker_extend(*rg, fam, rg->sort("O"));
  (void)joker;
  auto d = derive_signature(rg, fam);
  auto dj = derive_signature(rg, ext);
  auto iota = derived_morphism(SigMorphism::identity(rg), *d, *dj, identity_map(fam));
  CHECK(iota.validate().ok());
  CHECK(is_discrete_opfibration(iota));
}

TEST_CASE("the forgetful projection is an opfibration") {
  gen::Rng rng(34);
  for (int trial = 0; trial < 40; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 4));
    auto fam = gen::random_family(rng, *sig, 2);
    auto d = derive_signature(sig, fam);
    auto pos = positive_part(*sig);
    auto u = forgetful(*d, pos);
    CHECK(u.validate().ok());
    CHECK(is_discrete_opfibration(u));
    // Fanout transport: sizes shift down one rank.
    for (SortId k = 0; k < d->sig->sort_count(); ++k)
      for (std::size_t m = 0; m < d->sig->rank(k); ++m)
        CHECK(d->sig->fanout(k, m).size() == sig->fanout(d->parent[k], m + 1).size());
  }
}

TEST_CASE("integrate inverts derive_structure") {
  gen::Rng rng(35);
  for (int trial = 0; trial < 60; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 4));
    auto m = gen::random_structure(rng, sig, 3);
    auto ds = derive_structure(m);
    auto back = integrate(*ds.dsig, *ds.structure, m.name());
    REQUIRE(validate_structure(back).ok());
    for (SortId k = 0; k < sig->sort_count(); ++k) CHECK(back.size(k) == m.size(k));
    auto again = derive_structure(back);
    for (SortId k = 0; k < ds.dsig->sig->sort_count(); ++k)
      CHECK(again.structure->size(k) == ds.structure->size(k));
  }
  for (const auto& [name, m] : shipped_structures()) {
    auto ds = derive_structure(m);
    CHECK_MESSAGE(same_by_name(integrate(*ds.dsig, *ds.structure, m.name()), m), name);
  }
}

}  // TEST_SUITE

// Acceptance checks: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "foldskit/builtins.hpp"
#include "foldskit/catalog.hpp"
#include "foldskit/dsl.hpp"
#include "foldskit/indiscernibility.hpp"
#include "foldskit/logic.hpp"
#include "foldskit/morphisms.hpp"

using namespace folds;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

/// Accumulates failures; the first few are kept for the report line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  Verdict verdict(const std::string& summary) const {
    std::ostringstream os;
    os << summary << " [" << checks_ << " checks";
    if (failures_) os << ", " << failures_ << " failed: " << notes_;
    os << "]";
    return {failures_ == 0, os.str()};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::string notes_;
};

std::set<std::string> arrow_names(const CompositionTable& t, const std::vector<std::size_t>& ids) {
  std::set<std::string> out;
  for (auto i : ids) out.insert(t.arrows[i].name);
  return out;
}

/// Yoneda extraction over every object pair of a category-like structure.
void check_bridge(Checker& c, const CompositionTable& t, const Structure& m,
                  const std::function<std::vector<std::size_t>(std::size_t, std::size_t)>& oracle) {
  SortId o = m.signature().sort("O");
  SortId arrows = m.signature().sort("A");
  IndiscernibilityEngine engine(std::make_shared<const Structure>(m));
  for (std::size_t a = 0; a < t.objects.size(); ++a) {
    ElemId ida = m.element(arrows, t.arrows[t.identity[a]].name);
    for (std::size_t b = 0; b < t.objects.size(); ++b) {
      auto found = engine.list(o, m.element(o, t.objects[a]), m.element(o, t.objects[b]));
      auto expected = arrow_names(t, oracle(a, b));
      std::set<std::string> images;
      for (const auto& phi : found) images.insert(yoneda_image(phi, m, "A", "c", ida));
      std::string where = t.name + " (" + t.objects[a] + "," + t.objects[b] + ")";
      c.expect(found.size() == expected.size(), where + " count");
      c.expect(images.size() == found.size() && images == expected, where + " extraction");
    }
  }
}

std::vector<CompositionTable> monoids_and_posets() {
  std::vector<CompositionTable> out;
  for (const auto& t : category_catalog())
    if (t.name.rfind("monoid", 0) == 0 || t.name.rfind("poset", 0) == 0) out.push_back(t);
  return out;
}

FamilyMap identity_map(const BottomFamily& fam) {
  FamilyMap f(fam.members.size());
  for (std::size_t k = 0; k < fam.members.size(); ++k)
    for (ElemId e = 0; e < fam.members[k].size(); ++e) f[k].push_back(e);
  return f;
}

// 1 -------------------------------------------------------------------------
Verdict signature_algebra() {
  Checker c;
  auto s = builtin_signature("cat+E");
  SortId o = s->sort("O"), a = s->sort("A"), t = s->sort("T"), i = s->sort("I"), e = s->sort("E");
  c.expect(s->hom_set(t, o).size() == 3, "|hom(T,O)| = 3");
  c.expect(s->hom_set(i, o).size() == 1, "|hom(I,O)| = 1");
  // d.e1 = d.e2 and c.e1 = c.e2 leave two classes E -> O: d.e1 and c.e1.
  c.expect(s->hom_set(e, o).size() == 2, "|hom(E,O)| = 2");
  c.expect(s->fanout(a, 0).size() == 2, "|fanout(A,0)| = 2");
  c.expect(s->height() == 3, "height = 3");
  auto path = [&](SortId src, std::vector<std::string> outside_in) {
    Path p{src, {}};
    SortId at = src;
    for (auto it = outside_in.rbegin(); it != outside_in.rend(); ++it) {
      GenId g = *s->find_generator(at, *it);
      p.steps.push_back(g);
      at = s->generator(g).target;
    }
    return s->classify(p);
  };
  c.expect(path(t, {"c", "t0"}) == path(t, {"d", "t1"}), "c.t0 = d.t1");
  c.expect(path(t, {"d", "t0"}) == path(t, {"d", "t2"}), "d.t0 = d.t2");
  c.expect(path(t, {"c", "t1"}) == path(t, {"c", "t2"}), "c.t1 = c.t2");
  c.expect(path(i, {"c", "i"}) == path(i, {"d", "i"}), "c.i = d.i");
  c.expect(path(e, {"d", "e1"}) == path(e, {"d", "e2"}), "d.e1 = d.e2");
  c.expect(path(e, {"c", "e1"}) == path(e, {"c", "e2"}), "c.e1 = c.e2");
  c.expect(path(t, {"d", "t0"}) != path(t, {"c", "t0"}), "d.t0 != c.t0");
  return c.verdict("cat+E hom(T,O) = 3, hom(I,O) = 1, hom(E,O) = 2 (d.e1, c.e1), "
                   "fanout(A,0) = 2, height 3");
}

// 2 -------------------------------------------------------------------------
Verdict derivative_shape() {
  Checker c;
  auto rg = builtin_signature("rg");
  auto d = derive_signature(rg, parse_family(*rg, "O={a,b}"));
  const auto& s = *d->sig;
  c.expect(s.sorts_of_rank(0).size() == 4, "4 rank-0 sorts");
  c.expect(s.sorts_of_rank(1).size() == 2, "2 rank-1 sorts");
  for (auto k : s.sorts_of_rank(1)) {
    auto gens = s.generators_of(k);
    c.expect(gens.size() == 1, "one generator per derived I");
    if (gens.empty()) continue;
    SortId target = s.generator(gens[0]).target;
    const auto& alpha = d->alpha[target];
    c.expect(alpha.size() == 2 && alpha[0] == alpha[1], s.sort_name(k) + " lands on a loop sort");
  }
  gen::Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 1, 5));
    auto fam = gen::random_family(rng, *sig, 3);
    c.expect(derive_signature(sig, fam)->sig->sort_count() == 0, "height-1 derivative is empty");
  }
  return c.verdict("rg over {a,b}: 4 + 2 sorts, I(x) -> A(x,x); height 1 derives to empty");
}

// 3 -------------------------------------------------------------------------
Verdict iso_bridge() {
  Checker c;
  auto tables = category_catalog();
  for (const auto& t : tables) {
    auto m = category_from_table(t);
    check_bridge(c, t, m, [&](std::size_t a, std::size_t b) { return oracle_isos(t, a, b); });
  }
  return c.verdict(std::to_string(tables.size()) + " catalog categories, every object pair");
}

// 4 -------------------------------------------------------------------------
Verdict standardness() {
  Checker c;
  for (const auto& t : category_catalog()) {
    auto m = category_from_table(t);
    SortId arrows = m.signature().sort("A");
    for (ElemId f = 0; f < m.size(arrows); ++f) {
      for (ElemId g = 0; g < m.size(arrows); ++g) {
        if (m.boundary(arrows, f, 0) != m.boundary(arrows, g, 0)) continue;
        auto n = indiscernibilities_at(m, arrows, f, g).list.size();
        c.expect(n == (f == g ? 1u : 0u), t.name + " " + m.element_name(arrows, f) + "~" +
                                              m.element_name(arrows, g));
      }
    }
  }
  auto e = total_e_structure();
  SortId a = e.signature().sort("A");
  c.expect(indiscernibilities_at(e, a, e.element(a, "f"), e.element(a, "g")).list.size() == 1,
           "total-E f ~ g");
  auto report = is_univalent(e);
  bool failed_at_a = false;
  for (const auto& lv : report.levels)
    if (lv.failure && lv.level == 1) failed_at_a = true;
  c.expect(!report.univalent && failed_at_a, "total-E not univalent at the arrow level");
  return c.verdict("f ~ g iff f = g on the catalog; total-E breaks it");
}

// 5 -------------------------------------------------------------------------
Verdict univalence_verdicts() {
  Checker c;
  c.expect(is_univalent(category_from_table(discrete_category(3))).univalent, "discrete-3");
  c.expect(is_univalent(category_from_table(linear_order(3))).univalent, "linear-order-3");
  std::size_t expected_univalent = 0;
  for (const auto& t : category_catalog()) {
    bool skeletal_rigid = true;
    for (std::size_t a = 0; a < t.objects.size(); ++a)
      for (std::size_t b = 0; b < t.objects.size(); ++b)
        skeletal_rigid = skeletal_rigid && oracle_isos(t, a, b).size() == (a == b ? 1u : 0u);
    expected_univalent += skeletal_rigid;
    c.expect(is_univalent(category_from_table(t)).univalent == skeletal_rigid, t.name);
  }
  auto iso = is_univalent(category_from_table(walking_iso()));
  c.expect(!iso.univalent && iso.levels[0].failure && iso.levels[0].failure->sort == "O" &&
               iso.levels[0].failure->a == "a" && iso.levels[0].failure->b == "b",
           "walking-iso fails at (a,b)");
  auto z2 = is_univalent(category_from_table(cyclic_group(2, {"e", "g"})));
  c.expect(!z2.univalent && z2.levels[0].failure && z2.levels[0].failure->a == "*" &&
               z2.levels[0].failure->count == 2,
           "Z/2 fails at (*,*)");
  return c.verdict(std::to_string(expected_univalent) +
                   " skeletal rigid catalog categories univalent; walking-iso and Z/2 rejected");
}

// 6 -------------------------------------------------------------------------
Verdict dagger_example() {
  Checker c;
  auto z4 = cyclic_group(4);
  for (auto [label, dag, want] :
       {std::tuple{"identity", identity_involution(z4), std::size_t{2}},
        std::tuple{"inverse", inverse_involution(z4), std::size_t{4}}}) {
    auto m = dagger_from_involution(z4, dag);
    SortId o = m.signature().sort("O");
    c.expect(count_indiscernibilities(m, o, 0, 0) == want, std::string("dagger = ") + label);
    c.expect(oracle_isos(z4, 0, 0).size() == 4, "4 isomorphisms");
    check_bridge(c, z4, m, [&](std::size_t a, std::size_t b) {
      return oracle_unitaries(z4, dag, a, b);
    });
  }
  return c.verdict("Z/4: dagger = identity gives 2 of 4, dagger = inverse gives 4 of 4");
}

// 7 -------------------------------------------------------------------------
Verdict functoriality() {
  Checker c;
  gen::Rng rng(7);
  std::size_t morphisms = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 5));
    auto inc = gen::down_closed_inclusion(rng, sig);
    auto r = gen::renaming(sig);
    auto fs = gen::random_family(rng, *inc.source, 3);
    auto fm = gen::random_family(rng, *sig, 3);
    auto fr = gen::random_family(rng, *r.target, 3);
    auto h1 = gen::random_family_map(rng, inc, fs, fm);
    auto h2 = gen::random_family_map(rng, r, fm, fr);
    auto ds = derive_signature(inc.source, fs);
    auto dm = derive_signature(sig, fm);
    auto dr = derive_signature(r.target, fr);

    auto did = derived_morphism(SigMorphism::identity(sig), *dm, *dm, identity_map(fm));
    c.expect(did == SigMorphism::identity(dm->sig), "identity law");
    c.expect(is_discrete_opfibration(did), "identity is an opfibration");
    ++morphisms;
    if (!h1 || !h2) continue;

    FamilyMap h12(h1->size());
    for (std::size_t k = 0; k < h1->size(); ++k)
      for (auto e : (*h1)[k]) h12[k].push_back((*h2)[inc.sort_map[k]][e]);
    auto d1 = derived_morphism(inc, *ds, *dm, *h1);
    auto d2 = derived_morphism(r, *dm, *dr, *h2);
    auto d12 = derived_morphism(inc.then(r), *ds, *dr, h12);
    c.expect(d1.then(d2) == d12, "composition law");
    bool o1 = is_discrete_opfibration(d1), o2 = is_discrete_opfibration(d2);
    bool o12 = is_discrete_opfibration(d12);
    c.expect(o1 && o2 && o12, "derived morphisms are opfibrations");
    c.expect(!(o12 && o2) || o1, "left cancellation");
    morphisms += 3;
  }
  return c.verdict("100 random signatures, " + std::to_string(morphisms) + " derived morphisms");
}

// 8 -------------------------------------------------------------------------
Verdict hsip() {
  Checker c;
  std::vector<Structure> univalent;
  auto small = [](const Structure& m) {
    for (SortId k = 0; k < m.signature().sort_count(); ++k)
      if (m.size(k) > 4) return false;
    return true;
  };
  for (const auto& t : category_catalog()) {
    auto m = category_from_table(t);
    if (small(m) && is_univalent(m).univalent) univalent.push_back(m);
  }
  for (const auto& [name, m] : shipped_structures())
    if (small(m) && is_univalent(m).univalent) univalent.push_back(m);
  std::size_t sse = 0, pairs = 0;
  for (const auto& m : univalent) {
    for (const auto& n : univalent) {
      if (!(m.signature() == n.signature())) continue;
      auto r = hsip_check(m, n);
      ++pairs;
      sse += r.sse;
      c.expect(r.applicable && r.codomain_univalent, m.name() + " -> " + n.name() + " applicable");
      c.expect(r.ok(), m.name() + " -> " + n.name() + ": " +
                           (r.counterexamples.empty() ? "" : r.counterexamples.front()));
    }
  }
  return c.verdict(std::to_string(univalent.size()) + " univalent structures, " +
                   std::to_string(pairs) + " pairs, " + std::to_string(sse) +
                   " split surjective equivalences, all bijective");
}

// 9 -------------------------------------------------------------------------
Verdict injectivity() {
  Checker c;
  gen::Rng rng(9);
  std::size_t made = 0, implications = 0;
  while (made < 50) {
    auto sig = std::make_shared<const Signature>(gen::random_signature(rng, 3, 4));
    auto n = gen::random_structure(rng, sig, 3);
    auto m0 = gen::random_family(rng, *sig, 3);
    auto f0 = gen::random_family_map(rng, SigMorphism::identity(sig), m0, bottom_family(n));
    if (!f0) continue;
    auto pb = gen::pullback_along_bottom(n, m0, *f0);
    ++made;
    c.expect(validate_morphism(pb.m, n, pb.f).ok(), "generated morphism is natural");
    // The derived structure is exactly the pullback of N's.
    auto dm = derive_structure(pb.m);
    auto dn = derive_structure(n);
    auto along = derived_morphism(SigMorphism::identity(sig), *dm.dsig, *dn.dsig, *f0);
    // Carriers are N's fibers read through f, element for element.
    auto pulled = pullback_structure(along, *dn.structure);
    const auto& ds = *dm.dsig->sig;
    bool exact = pulled.signature() == ds;
    for (SortId t = 0; exact && t < ds.sort_count(); ++t) {
      exact = pulled.size(t) == dm.structure->size(t);
      SortId parent = dm.dsig->parent[t];
      for (ElemId x = 0; exact && x < pulled.size(t); ++x) {
        ElemId image = pb.f.maps[parent][dm.origin[t][x]];
        exact = pulled.element_name(t, x) == n.element_name(parent, image);
      }
    }
    for (GenId g = 0; exact && g < ds.generator_count(); ++g)
      exact = pulled.action(g) == dm.structure->action(g);
    c.expect(exact, "exact pullback");
    for (auto k : sig->sorts_of_rank(0)) {
      for (ElemId x = 0; x < pb.m.size(k); ++x) {
        for (ElemId y = 0; y < pb.m.size(k); ++y) {
          if (count_indiscernibilities(n, k, pb.f.maps[k][x], pb.f.maps[k][y], 1) == 0) continue;
          ++implications;
          c.expect(count_indiscernibilities(pb.m, k, x, y, 1) == 1, "x ~ y reflected");
        }
      }
    }
  }
  return c.verdict("50 pulled-back morphisms, " + std::to_string(implications) +
                   " nonempty f(x) ~ f(y) reflected");
}

// 10 ------------------------------------------------------------------------
Verdict logic() {
  Checker c;
  auto cat = builtin_theory("cat_axioms");
  std::size_t mutations = 0, exempt = 0;
  for (const auto& t : monoids_and_posets()) {
    c.expect(check_theory(category_from_table(t), *cat).all_hold(), t.name + " satisfies");
    for (const auto& mu : composition_mutations(t)) {
      ++mutations;
      auto report = check_theory(mu.structure, *cat);
      if (mu.still_category) {
        // Overwriting one entry can land on another lawful table.
        ++exempt;
        c.expect(report.all_hold(), t.name + ": " + mu.description + " is lawful");
        continue;
      }
      bool with_countermodel = false;
      for (const auto& r : report.results)
        if (!r.holds && !r.countermodel.empty()) with_countermodel = true;
      c.expect(with_countermodel, t.name + ": " + mu.description);
    }
  }
  gen::Rng rng(10);
  std::size_t invariant = 0;
  for (const auto& t : category_catalog()) {
    auto m = category_from_table(t);
    if (!is_univalent(m).univalent) continue;
    auto [copy, f] = gen::shuffled_copy(rng, m);
    auto r = invariance_check(*cat, m, copy, f);
    c.expect(r.applicable && r.agree(), t.name + " invariance");
    ++invariant;
  }
  return c.verdict(std::to_string(mutations - exempt) + " breaking mutations caught (" +
                   std::to_string(exempt) + " yield another category), " +
                   std::to_string(invariant) + " renamed univalent copies agree");
}

// 11 ------------------------------------------------------------------------
Verdict relations() {
  Checker c;
  auto m = relation_m();
  auto n = relation_n();
  auto f = relation_inclusion();
  SortId a = m.signature().sort("A");
  c.expect(validate_morphism(m, n, f).ok(), "inclusion is a morphism");
  c.expect(count_indiscernibilities(m, a, m.element(a, "a"), m.element(a, "b")) == 1, "a ~ b in M");
  c.expect(count_indiscernibilities(n, a, f.maps[a][0], f.maps[a][1]) == 0, "f a !~ f b in N");
  return c.verdict("a ~ b in M, f(a) !~ f(b) in N");
}

// 12 ------------------------------------------------------------------------
Verdict dsl() {
  Checker c;
  std::size_t assets = 0;
  for (auto kind : {AssetKind::signature, AssetKind::structure, AssetKind::theory}) {
    for (const auto& name : builtin_names(kind)) {
      ++assets;
      switch (kind) {
        case AssetKind::signature: {
          auto s = builtin_signature(name);
          c.expect(parse_signature(serialize(*s)) == *s, name);
          break;
        }
        case AssetKind::structure: {
          auto m = builtin_structure(name);
          c.expect(parse_structure(serialize(*m), m->signature_ptr()) == *m, name);
          break;
        }
        case AssetKind::theory: {
          auto t = builtin_theory(name);
          auto back = parse_theory(serialize(*t), t->sig);
          bool same = back.axioms.size() == t->axioms.size();
          for (std::size_t i = 0; same && i < back.axioms.size(); ++i)
            same = back.axioms[i].name == t->axioms[i].name &&
                   same_formula(*back.axioms[i].formula, *t->axioms[i].formula);
          c.expect(same, name);
          break;
        }
      }
    }
  }
  gen::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto sig = gen::random_signature(rng, 3, 6);
    c.expect(parse_signature(serialize(sig)) == sig, "random signature " + std::to_string(trial));
  }
  // Mangled inputs: every located error must point inside the text.
  std::size_t errors = 0;
  const std::string junk = "{}(),:=.;\"@#-> x9";
  for (int trial = 0; trial < 300; ++trial) {
    auto names = builtin_names(AssetKind::signature);
    std::string text = builtin_text(AssetKind::signature, names[trial % names.size()]);
    std::size_t p = rng() % text.size();
    text[p] = junk[rng() % junk.size()];
    try {
      parse_signature(text);
    } catch (const InputError& err) {
      ++errors;
      std::vector<std::size_t> widths;
      std::istringstream in(text);
      for (std::string line; std::getline(in, line);) widths.push_back(line.size());
      for (const auto& d : err.diagnostics()) {
        if (!d.span) continue;
        bool inside = d.span->valid() && d.span->line <= widths.size() &&
                      d.span->column <= widths[d.span->line - 1] + 1;
        c.expect(inside, "span " + d.to_string());
      }
    }
  }
  return c.verdict(std::to_string(assets) + " assets and 200 random signatures round trip, " +
                   std::to_string(errors) + " located errors");
}

// 13 ------------------------------------------------------------------------
Verdict truncation() {
  Checker c;
  std::size_t univalent = 0;
  auto visit = [&](const Structure& m) {
    if (!is_univalent(m).univalent) return;
    ++univalent;
    c.expect(top_fiber_violations(m).empty(), m.name());
    auto r = truncation_report(m);
    c.expect(r.applicable && r.ok, m.name() + " report");
  };
  for (const auto& t : category_catalog()) visit(category_from_table(t));
  for (const auto& [name, m] : shipped_structures()) visit(m);
  return c.verdict(std::to_string(univalent) + " univalent structures, top fibers <= 1");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {1, "signature algebra", 1, signature_algebra},
      {2, "derivative shape", 1, derivative_shape},
      {3, "isomorphism bridge", 60, iso_bridge},
      {4, "standardness", 10, standardness},
      {5, "univalence verdicts", 10, univalence_verdicts},
      {6, "dagger example", 10, dagger_example},
      {7, "derivation functoriality", 60, functoriality},
      {8, "hsip", 60, hsip},
      {9, "injectivity transport", 30, injectivity},
      {10, "logic", 30, logic},
      {11, "non-preservation", 1, relations},
      {12, "dsl round trip", 30, dsl},
      {13, "truncation", 5, truncation},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = cr.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.limit_seconds) {
      v.pass = false;
      v.detail += " (over the " + std::to_string(static_cast<int>(cr.limit_seconds)) + " s limit)";
    }
    failed += !v.pass;
    std::printf("%-4s %2d %-26s %7.3fs  %s\n", v.pass ? "PASS" : "FAIL", cr.id, cr.name, secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}

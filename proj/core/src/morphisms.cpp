#include "foldskit/morphisms.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "foldskit/indiscernibility.hpp"

namespace folds {

namespace {

enum class Ladder { split_surjective, equivalence };

bool ladder(const SigMorphism& alpha, const Structure& m, const Structure& n,
            const StructureMorphism& f, Ladder mode, std::uint64_t budget) {
  const auto& s = m.signature();
  std::unique_ptr<IndiscernibilityEngine> engine;
  for (SortId k : s.sorts_of_rank(0)) {
    SortId ak = alpha.sort_map[k];
    std::vector<bool> hit(n.size(ak), false);
    for (ElemId v : f.maps[k]) hit[v] = true;
    for (ElemId y = 0; y < n.size(ak); ++y) {
      if (hit[y]) continue;
      if (mode == Ladder::split_surjective) return false;
      if (!engine) {
        engine = std::make_unique<IndiscernibilityEngine>(std::make_shared<Structure>(n), budget);
      }
      bool reached = false;
      for (ElemId x = 0; x < m.size(k) && !reached; ++x) {
        reached = engine->count(ak, f.maps[k][x], y, 1) > 0;
      }
      if (!reached) return false;
    }
  }
  if (s.height() <= 1) return true;

  auto dm = derive_structure(m, budget);
  auto dn = derive_structure(n, budget);
  FamilyMap fmap(s.sort_count());
  for (SortId k : s.sorts_of_rank(0)) fmap[k] = f.maps[k];
  SigMorphism beta = derived_morphism(alpha, *dm.dsig, *dn.dsig, fmap);
  const auto& ds = *dm.dsig->sig;
  StructureMorphism g;
  g.maps.resize(ds.sort_count());
  for (SortId t = 0; t < ds.sort_count(); ++t) {
    SortId k = dm.dsig->parent[t];
    SortId ak = alpha.sort_map[k];
    for (ElemId e : dm.origin[t]) {
      auto [where, index] = dn.placement[ak][f.maps[k][e]];
      if (where != beta.sort_map[t]) {
        throw InputError("morphism is not natural: element '" + m.element_name(k, e) +
                         "' lands outside its fiber");
      }
      g.maps[t].push_back(index);
    }
  }
  return ladder(beta, *dm.structure, *dn.structure, g, mode, budget);
}

void require_valid(const SigMorphism& alpha, const Structure& m, const Structure& n,
                   const StructureMorphism& f) {
  auto report = validate_morphism(alpha, m, n, f);
  if (!report.ok()) throw InputError(report.entries);
}

SigMorphism identity_on(const Structure& m, const Structure& n) {
  if (!(m.signature() == n.signature())) {
    throw InputError("structures '" + m.name() + "' and '" + n.name() +
                     "' are over different signatures");
  }
  return SigMorphism::identity(n.signature_ptr());
}

}  // namespace

ValidationReport validate_morphism(const SigMorphism& alpha, const Structure& m,
                                   const Structure& n, const StructureMorphism& f) {
  ValidationReport r;
  const auto& s = m.signature();
  if (alpha.sort_map.size() != s.sort_count() || f.maps.size() != s.sort_count()) {
    r.add("morphism does not cover every sort");
    return r;
  }
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (f.maps[k].size() != m.size(k)) {
      r.add("map at sort '" + s.sort_name(k) + "' is not total");
      continue;
    }
    for (ElemId v : f.maps[k]) {
      if (v >= n.size(alpha.sort_map[k])) {
        r.add("map at sort '" + s.sort_name(k) + "' leaves the codomain carrier");
        break;
      }
    }
  }
  if (!r.ok()) return r;
  for (GenId g = 0; g < s.generator_count(); ++g) {
    const auto& gen = s.generator(g);
    for (ElemId x = 0; x < m.size(gen.source); ++x) {
      ElemId lhs = n.act(alpha.gen_map[g], f.maps[gen.source][x]);
      ElemId rhs = f.maps[gen.target][m.act(g, x)];
      if (lhs != rhs) {
        r.add("naturality fails at '" + gen.label + "' for element '" +
              m.element_name(gen.source, x) + "' of sort '" + s.sort_name(gen.source) + "'");
      }
    }
  }
  return r;
}

ValidationReport validate_morphism(const Structure& m, const Structure& n,
                                   const StructureMorphism& f) {
  return validate_morphism(identity_on(m, n), m, n, f);
}

StructureMorphism identity_morphism(const Structure& m) {
  StructureMorphism f;
  for (SortId k = 0; k < m.signature().sort_count(); ++k) {
    std::vector<ElemId> id(m.size(k));
    for (ElemId e = 0; e < id.size(); ++e) id[e] = e;
    f.maps.push_back(std::move(id));
  }
  return f;
}

StructureMorphism compose(const StructureMorphism& f, const StructureMorphism& g) {
  StructureMorphism out = f;
  for (std::size_t k = 0; k < out.maps.size(); ++k) {
    for (auto& v : out.maps[k]) v = g.maps.at(k).at(v);
  }
  return out;
}

std::vector<StructureMorphism> enumerate_morphisms(const Structure& m, const Structure& n,
                                                   std::uint64_t budget, std::size_t limit) {
  identity_on(m, n);
  const auto& s = m.signature();
  std::vector<std::map<Boundary, std::vector<ElemId>>> index(s.sort_count());
  for (SortId k = 0; k < s.sort_count(); ++k) {
    for (ElemId y = 0; y < n.size(k); ++y) index[k][n.generator_images(k, y)].push_back(y);
  }
  std::vector<std::pair<SortId, ElemId>> slots;
  std::vector<SortId> sorts(s.sort_count());
  for (SortId k = 0; k < sorts.size(); ++k) sorts[k] = k;
  std::stable_sort(sorts.begin(), sorts.end(),
                   [&](SortId a, SortId b) { return s.rank(a) < s.rank(b); });
  for (SortId k : sorts) {
    for (ElemId e = 0; e < m.size(k); ++e) slots.emplace_back(k, e);
  }

  std::vector<StructureMorphism> out;
  StructureMorphism f;
  f.maps.resize(s.sort_count());
  for (SortId k = 0; k < s.sort_count(); ++k) f.maps[k].assign(m.size(k), 0);
  NodeBudget nodes(budget, "morphism enumeration");
  Boundary key;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (out.size() >= limit) return;
    if (i == slots.size()) {
      out.push_back(f);
      return;
    }
    auto [k, e] = slots[i];
    auto gens = s.generators_of(k);
    Boundary want(gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j) {
      want[j] = f.maps[s.generator(gens[j]).target][m.act(gens[j], e)];
    }
    auto it = index[k].find(want);
    if (it == index[k].end()) return;
    for (ElemId y : it->second) {
      nodes.tick();
      f.maps[k][e] = y;
      self(self, i + 1);
      if (out.size() >= limit) return;
    }
  };
  rec(rec, 0);
  return out;
}

bool is_iso(const Structure& m, const Structure& n, const StructureMorphism& f) {
  require_valid(identity_on(m, n), m, n, f);
  for (SortId k = 0; k < m.signature().sort_count(); ++k) {
    if (m.size(k) != n.size(k)) return false;
    std::vector<bool> hit(n.size(k), false);
    for (ElemId v : f.maps[k]) {
      if (hit[v]) return false;
      hit[v] = true;
    }
  }
  return true;
}

std::optional<StructureMorphism> inverse_morphism(const Structure& m, const Structure& n,
                                                  const StructureMorphism& f) {
  if (!is_iso(m, n, f)) return std::nullopt;
  StructureMorphism g;
  for (const auto& map : f.maps) {
    std::vector<ElemId> inv(map.size());
    for (ElemId x = 0; x < map.size(); ++x) inv[map[x]] = x;
    g.maps.push_back(std::move(inv));
  }
  return g;
}

bool is_sse(const Structure& m, const Structure& n, const StructureMorphism& f,
            std::uint64_t budget) {
  auto alpha = identity_on(m, n);
  require_valid(alpha, m, n, f);
  return ladder(alpha, m, n, f, Ladder::split_surjective, budget);
}

bool is_equivalence(const Structure& m, const Structure& n, const StructureMorphism& f,
                    std::uint64_t budget) {
  return is_equivalence_rel(identity_on(m, n), m, n, f, budget);
}

bool is_equivalence_rel(const SigMorphism& alpha, const Structure& m, const Structure& n,
                        const StructureMorphism& f, std::uint64_t budget) {
  if (!(*alpha.source == m.signature()) || !(*alpha.target == n.signature())) {
    throw InputError("relative equivalence: structures do not match the signature morphism");
  }
  if (!is_discrete_opfibration(alpha)) {
    throw InputError("relative equivalence: the signature morphism is not a discrete opfibration");
  }
  require_valid(alpha, m, n, f);
  return ladder(alpha, m, n, f, Ladder::equivalence, budget);
}

std::string format_morphism(const Structure& m, const Structure& n, const StructureMorphism& f) {
  std::ostringstream os;
  const auto& s = m.signature();
  bool first_sort = true;
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (m.size(k) == 0) continue;
    os << (first_sort ? "" : "; ") << s.sort_name(k) << ": ";
    first_sort = false;
    for (ElemId x = 0; x < m.size(k); ++x) {
      os << (x ? ", " : "") << m.element_name(k, x) << "->" << n.element_name(k, f.maps[k][x]);
    }
  }
  return os.str();
}

HsipReport hsip_check(const Structure& m, const Structure& n, std::uint64_t budget) {
  identity_on(m, n);
  HsipReport r;
  if (!is_univalent(m, budget).univalent) {
    r.applicable = false;
    r.note = "hypothesis not met: M not univalent";
    return r;
  }
  r.codomain_univalent = is_univalent(n, budget).univalent;
  auto all = enumerate_morphisms(m, n, budget);
  r.morphisms = all.size();
  for (const auto& f : all) {
    bool sse = is_sse(m, n, f, budget);
    bool iso = is_iso(m, n, f);
    bool eqv = is_equivalence(m, n, f, budget);
    r.sse += sse;
    r.isos += iso;
    r.equivalences += eqv;
    if (sse && !iso) {
      r.counterexamples.push_back("split surjective equivalence that is not a bijection: " +
                                  format_morphism(m, n, f));
    }
    if (sse && !eqv) {
      r.counterexamples.push_back("split surjective equivalence that is not an equivalence: " +
                                  format_morphism(m, n, f));
    }
    if (r.codomain_univalent && eqv && !sse) {
      r.counterexamples.push_back("equivalence into a univalent codomain that is not split surjective: " +
                                  format_morphism(m, n, f));
    }
  }
  r.note = r.ok() ? "every split surjective equivalence is an isomorphism"
                  : "IMPLEMENTATION BUG: counterexamples found";
  return r;
}

std::string HsipReport::to_string() const {
  std::ostringstream os;
  if (!applicable) {
    os << note << "\n";
    return os.str();
  }
  os << "morphisms: " << morphisms << "\n"
     << "split surjective equivalences: " << sse << "\n"
     << "isomorphisms: " << isos << "\n"
     << "equivalences: " << equivalences << "\n"
     << "codomain univalent: " << (codomain_univalent ? "true" : "false") << "\n"
     << note << "\n";
  for (const auto& c : counterexamples) os << "  " << c << "\n";
  return os.str();
}

}  // namespace folds

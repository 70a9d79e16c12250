#include "foldskit/catalog.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "foldskit/builtins.hpp"

namespace folds {

namespace {

constexpr std::size_t kNone = CompositionTable::kNone;

/// Accumulates elements and generator images, then checks the result.
class Builder {
 public:
  Builder(SignaturePtr sig, std::string name)
      : sig_(std::move(sig)),
        name_(std::move(name)),
        elements_(sig_->sort_count()),
        actions_(sig_->generator_count()) {}

  ElemId add(const std::string& sort, std::string name,
             const std::vector<std::pair<std::string, ElemId>>& images = {}) {
    SortId k = sig_->sort(sort);
    auto e = static_cast<ElemId>(elements_[k].size());
    elements_[k].push_back(std::move(name));
    for (GenId g : sig_->generators_of(k)) actions_[g].resize(e + 1, 0);
    for (const auto& [label, v] : images) {
      auto g = sig_->find_generator(k, label);
      if (!g) throw InputError("sort '" + sort + "' has no generator '" + label + "'");
      actions_[*g][e] = v;
    }
    return e;
  }

  Structure build() {
    return Structure::checked(sig_, name_, std::move(elements_), std::move(actions_));
  }

 private:
  SignaturePtr sig_;
  std::string name_;
  std::vector<std::vector<std::string>> elements_;
  std::vector<std::vector<ElemId>> actions_;
};

ElemId id(std::size_t i) { return static_cast<ElemId>(i); }

std::string letter_name(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('a' + i));
  return "o" + std::to_string(i);
}

/// Fills every composite forced by the hom-set sizes: identities act as
/// units and a composite landing in a singleton hom-set is that arrow.
void fill_forced(CompositionTable& t) {
  std::size_t n = t.arrows.size();
  t.comp.assign(n, std::vector<std::size_t>(n, kNone));
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) {
      if (t.arrows[f].cod != t.arrows[g].dom) continue;
      if (t.identity[t.arrows[f].dom] == f) {
        t.comp[f][g] = g;
      } else if (t.identity[t.arrows[g].cod] == g) {
        t.comp[f][g] = f;
      } else {
        auto hom = t.hom(t.arrows[f].dom, t.arrows[g].cod);
        if (hom.size() == 1) t.comp[f][g] = hom[0];
      }
    }
  }
}

void add_category(Builder& b, const CompositionTable& t) {
  for (const auto& o : t.objects) b.add("O", o);
  for (const auto& a : t.arrows) b.add("A", a.name, {{"d", id(a.dom)}, {"c", id(a.cod)}});
  for (std::size_t f = 0; f < t.arrows.size(); ++f) {
    for (std::size_t g = 0; g < t.arrows.size(); ++g) {
      std::size_t h = t.comp[f][g];
      if (h == kNone) continue;
      b.add("T", "t(" + t.arrows[f].name + "," + t.arrows[g].name + "," + t.arrows[h].name + ")",
            {{"t0", id(f)}, {"t1", id(g)}, {"t2", id(h)}});
    }
  }
  for (std::size_t x = 0; x < t.objects.size(); ++x) {
    b.add("I", "i(" + t.arrows[t.identity[x]].name + ")", {{"i", id(t.identity[x])}});
  }
  for (std::size_t f = 0; f < t.arrows.size(); ++f) {
    const auto& n = t.arrows[f].name;
    b.add("E", "e(" + n + "," + n + ")", {{"e1", id(f)}, {"e2", id(f)}});
  }
}

template <class T>
std::vector<std::vector<T>> permuted(const std::vector<std::vector<T>>& m,
                                     const std::vector<std::size_t>& p, bool map_values) {
  std::size_t n = m.size();
  std::vector<std::vector<T>> out(n, std::vector<T>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T v = m[i][j];
      if constexpr (std::is_same_v<T, std::size_t>) {
        if (map_values) v = p[v];
      }
      out[p[i]][p[j]] = v;
    }
  }
  return out;
}

std::vector<std::string> monoid_names(std::size_t n) {
  std::vector<std::string> out{"e"};
  for (std::size_t i = 1; i < n; ++i) out.push_back("m" + std::to_string(i));
  return out;
}

std::vector<std::string> point_names(std::size_t n) { return numbered_names(n, "p"); }

}  // namespace

// ---------------------------------------------------------------------------
// Composition tables.
// ---------------------------------------------------------------------------

std::vector<std::size_t> CompositionTable::hom(std::size_t a, std::size_t b) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < arrows.size(); ++f) {
    if (arrows[f].dom == a && arrows[f].cod == b) out.push_back(f);
  }
  return out;
}

std::size_t CompositionTable::object(const std::string& n) const {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i] == n) return i;
  }
  throw InputError("table '" + name + "' has no object '" + n + "'");
}

std::size_t CompositionTable::arrow(const std::string& n) const {
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    if (arrows[i].name == n) return i;
  }
  throw InputError("table '" + name + "' has no arrow '" + n + "'");
}

ValidationReport CompositionTable::validate() const {
  ValidationReport r;
  std::size_t n = arrows.size();
  for (const auto& a : arrows) {
    if (a.dom >= objects.size() || a.cod >= objects.size()) {
      r.add("arrow '" + a.name + "' has an endpoint outside the object list");
    }
  }
  if (identity.size() != objects.size()) r.add("expected one identity per object");
  if (comp.size() != n) r.add("composition table has the wrong size");
  if (!r.ok()) return r;
  for (std::size_t x = 0; x < objects.size(); ++x) {
    std::size_t u = identity[x];
    if (u >= n || arrows[u].dom != x || arrows[u].cod != x) {
      r.add("identity of '" + objects[x] + "' is not a loop at it");
    }
  }
  for (const auto& row : comp) {
    if (row.size() != n) r.add("composition table has the wrong size");
  }
  if (!r.ok()) return r;
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) {
      std::size_t h = comp[f][g];
      const auto& fn = arrows[f].name;
      const auto& gn = arrows[g].name;
      if (arrows[f].cod != arrows[g].dom) {
        if (h != kNone) r.add("composite of " + fn + " then " + gn + " given for non-composable pair");
        continue;
      }
      if (h == kNone || h >= n) {
        r.add("composite of " + fn + " then " + gn + " is missing");
      } else if (arrows[h].dom != arrows[f].dom || arrows[h].cod != arrows[g].cod) {
        r.add("composite of " + fn + " then " + gn + " has the wrong endpoints");
      }
    }
  }
  if (!r.ok()) return r;
  for (std::size_t f = 0; f < n; ++f) {
    if (comp[identity[arrows[f].dom]][f] != f || comp[f][identity[arrows[f].cod]] != f) {
      r.add("unit law fails at " + arrows[f].name);
    }
  }
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) {
      if (comp[f][g] == kNone) continue;
      for (std::size_t h = 0; h < n; ++h) {
        if (comp[g][h] == kNone) continue;
        if (comp[comp[f][g]][h] != comp[f][comp[g][h]]) {
          r.add("associativity fails at (" + arrows[f].name + ", " + arrows[g].name + ", " +
                arrows[h].name + ")");
        }
      }
    }
  }
  return r;
}

CompositionTable monoid_table(std::string name, std::vector<std::string> names,
                              const std::vector<std::vector<std::size_t>>& mult) {
  CompositionTable t;
  t.name = std::move(name);
  t.objects = {"*"};
  for (auto& n : names) t.arrows.push_back({std::move(n), 0, 0});
  t.identity = {0};
  std::size_t n = t.arrows.size();
  t.comp.assign(n, std::vector<std::size_t>(n, kNone));
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) t.comp[f][g] = mult.at(g).at(f);
  }
  return t;
}

CompositionTable cyclic_group(std::size_t n, std::vector<std::string> names) {
  if (names.empty()) names = numbered_names(n, "");
  std::vector<std::vector<std::size_t>> mult(n, std::vector<std::size_t>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) mult[x][y] = (x + y) % n;
  }
  return monoid_table("Z/" + std::to_string(n), std::move(names), mult);
}

CompositionTable poset_table(std::string name, std::vector<std::string> objects,
                             const std::vector<std::vector<bool>>& leq) {
  CompositionTable t;
  t.name = std::move(name);
  t.objects = std::move(objects);
  std::size_t n = t.objects.size();
  t.identity.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!leq.at(i).at(j)) continue;
      if (i == j) {
        t.identity[i] = t.arrows.size();
        t.arrows.push_back({"id_" + t.objects[i], i, i});
      } else {
        t.arrows.push_back({t.objects[i] + "_" + t.objects[j], i, j});
      }
    }
  }
  fill_forced(t);
  return t;
}

CompositionTable discrete_category(std::size_t n) {
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    leq[i][i] = true;
    names.push_back(letter_name(i));
  }
  return poset_table("discrete-" + std::to_string(n), names, leq);
}

CompositionTable linear_order(std::size_t n) {
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) leq[i][j] = true;
    names.push_back(letter_name(i));
  }
  return poset_table("linear-order-" + std::to_string(n), names, leq);
}

CompositionTable walking_arrow() {
  CompositionTable t;
  t.name = "walking-arrow";
  t.objects = {"a", "b"};
  t.arrows = {{"1a", 0, 0}, {"1b", 1, 1}, {"f", 0, 1}};
  t.identity = {0, 1};
  fill_forced(t);
  return t;
}

CompositionTable walking_iso() {
  CompositionTable t;
  t.name = "walking-iso";
  t.objects = {"a", "b"};
  t.arrows = {{"1a", 0, 0}, {"1b", 1, 1}, {"f", 0, 1}, {"g", 1, 0}};
  t.identity = {0, 1};
  fill_forced(t);
  return t;
}

CompositionTable parallel_pair() {
  CompositionTable t;
  t.name = "parallel-pair";
  t.objects = {"a", "b"};
  t.arrows = {{"1a", 0, 0}, {"1b", 1, 1}, {"f", 0, 1}, {"g", 0, 1}};
  t.identity = {0, 1};
  fill_forced(t);
  return t;
}

std::vector<std::vector<std::vector<std::size_t>>> enumerate_monoids(std::size_t n) {
  if (n == 0) return {};
  using Table = std::vector<std::vector<std::size_t>>;
  std::set<Table> found;
  Table m(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    m[0][i] = i;
    m[i][0] = i;
  }
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 1; j < n; ++j) cells.emplace_back(i, j);
  }
  auto associative = [&] {
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t z = 0; z < n; ++z) {
          if (m[m[x][y]][z] != m[x][m[y][z]]) return false;
        }
      }
    }
    return true;
  };
  std::vector<std::size_t> perm(n);
  std::function<void(std::size_t)> fill = [&](std::size_t c) {
    if (c == cells.size()) {
      if (!associative()) return;
      std::iota(perm.begin(), perm.end(), 0);
      Table best = m;
      while (std::next_permutation(perm.begin() + 1, perm.end())) {
        best = std::min(best, permuted(m, perm, true));
      }
      found.insert(best);
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      m[cells[c].first][cells[c].second] = v;
      fill(c + 1);
    }
  };
  fill(0);
  return {found.begin(), found.end()};
}

std::vector<std::vector<std::vector<bool>>> enumerate_posets(std::size_t n) {
  if (n == 0) return {};
  using Rel = std::vector<std::vector<bool>>;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  std::set<Rel> found;
  std::vector<std::size_t> perm(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
    Rel r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) r[i][i] = true;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (mask >> p & 1) r[pairs[p].first][pairs[p].second] = true;
    }
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j < n && ok; ++j) {
        if (i != j && r[i][j] && r[j][i]) ok = false;
        for (std::size_t k = 0; k < n && ok; ++k) {
          if (r[i][j] && r[j][k] && !r[i][k]) ok = false;
        }
      }
    }
    if (!ok) continue;
    std::iota(perm.begin(), perm.end(), 0);
    Rel best = r;
    while (std::next_permutation(perm.begin(), perm.end())) {
      best = std::min(best, permuted(r, perm, false));
    }
    found.insert(best);
  }
  return {found.begin(), found.end()};
}

std::vector<CompositionTable> category_catalog() {
  std::vector<CompositionTable> out;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto monoids = enumerate_monoids(n);
    for (std::size_t i = 0; i < monoids.size(); ++i) {
      out.push_back(monoid_table("monoid" + std::to_string(n) + "-" + std::to_string(i),
                                 monoid_names(n), monoids[i]));
    }
  }
  for (std::size_t n = 1; n <= 4; ++n) {
    auto posets = enumerate_posets(n);
    for (std::size_t i = 0; i < posets.size(); ++i) {
      out.push_back(poset_table("poset" + std::to_string(n) + "-" + std::to_string(i),
                                point_names(n), posets[i]));
    }
  }
  out.push_back(walking_arrow());
  out.push_back(walking_iso());
  out.push_back(parallel_pair());
  out.push_back(discrete_category(3));
  out.push_back(linear_order(3));
  out.push_back(cyclic_group(2, {"e", "g"}));
  return out;
}

Structure category_from_table(const CompositionTable& t) {
  auto report = t.validate();
  if (!report.ok()) throw InputError(report.entries);
  Builder b(builtin_signature("cat+E"), t.name);
  add_category(b, t);
  return b.build();
}

CompositionTable table_from_category(const Structure& m) {
  const auto& s = m.signature();
  SortId o = s.sort("O"), a = s.sort("A"), tt = s.sort("T"), ii = s.sort("I");
  auto gen = [&](SortId k, const char* label) {
    auto g = s.find_generator(k, label);
    if (!g) throw InputError("sort '" + s.sort_name(k) + "' lacks generator '" + label + "'");
    return *g;
  };
  GenId d = gen(a, "d"), c = gen(a, "c");
  GenId t0 = gen(tt, "t0"), t1 = gen(tt, "t1"), t2 = gen(tt, "t2"), gi = gen(ii, "i");

  CompositionTable t;
  t.name = m.name();
  t.objects = m.elements(o);
  for (ElemId f = 0; f < m.size(a); ++f) t.arrows.push_back({m.element_name(a, f), m.act(d, f), m.act(c, f)});
  t.identity.assign(t.objects.size(), kNone);
  for (ElemId e = 0; e < m.size(ii); ++e) {
    ElemId u = m.act(gi, e);
    t.identity[m.act(d, u)] = u;
  }
  for (std::size_t x = 0; x < t.objects.size(); ++x) {
    if (t.identity[x] == kNone) throw InputError("object '" + t.objects[x] + "' has no identity");
  }
  std::size_t n = t.arrows.size();
  t.comp.assign(n, std::vector<std::size_t>(n, kNone));
  for (ElemId e = 0; e < m.size(tt); ++e) t.comp[m.act(t0, e)][m.act(t1, e)] = m.act(t2, e);
  return t;
}

std::vector<std::size_t> oracle_isos(const CompositionTable& t, std::size_t a, std::size_t b) {
  std::vector<std::size_t> out;
  for (std::size_t f : t.hom(a, b)) {
    for (std::size_t g : t.hom(b, a)) {
      if (t.then(f, g) == t.identity[a] && t.then(g, f) == t.identity[b]) {
        out.push_back(f);
        break;
      }
    }
  }
  return out;
}

ValidationReport validate_involution(const CompositionTable& t,
                                     const std::vector<std::size_t>& dag) {
  ValidationReport r;
  std::size_t n = t.arrows.size();
  if (dag.size() != n) {
    r.add("dagger must map every arrow");
    return r;
  }
  for (std::size_t f = 0; f < n; ++f) {
    const auto& fn = t.arrows[f].name;
    if (dag[f] >= n) {
      r.add("dagger of " + fn + " is not an arrow");
      continue;
    }
    if (t.arrows[dag[f]].dom != t.arrows[f].cod || t.arrows[dag[f]].cod != t.arrows[f].dom) {
      r.add("dagger of " + fn + " does not reverse its endpoints");
      continue;
    }
    if (dag[dag[f]] != f) r.add("dagger is not involutive at " + fn);
  }
  if (!r.ok()) return r;
  for (std::size_t x = 0; x < t.objects.size(); ++x) {
    if (dag[t.identity[x]] != t.identity[x]) r.add("dagger moves the identity of " + t.objects[x]);
  }
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) {
      std::size_t h = t.comp[f][g];
      if (h == kNone) continue;
      if (dag[h] != t.then(dag[g], dag[f])) {
        r.add("dagger is not contravariant at (" + t.arrows[f].name + ", " + t.arrows[g].name + ")");
      }
    }
  }
  return r;
}

Structure dagger_from_involution(const CompositionTable& t, const std::vector<std::size_t>& dag,
                                 std::string name) {
  auto report = t.validate();
  report.append(validate_involution(t, dag));
  if (!report.ok()) throw InputError(report.entries);
  Builder b(builtin_signature("dagger"), name.empty() ? t.name : std::move(name));
  add_category(b, t);
  for (std::size_t f = 0; f < t.arrows.size(); ++f) {
    b.add("D", "d(" + t.arrows[f].name + "," + t.arrows[dag[f]].name + ")",
          {{"o", id(f)}, {"i", id(dag[f])}});
  }
  return b.build();
}

std::vector<std::size_t> oracle_unitaries(const CompositionTable& t,
                                          const std::vector<std::size_t>& dag, std::size_t a,
                                          std::size_t b) {
  std::vector<std::size_t> out;
  for (std::size_t f : t.hom(a, b)) {
    if (t.then(f, dag[f]) == t.identity[a] && t.then(dag[f], f) == t.identity[b]) out.push_back(f);
  }
  return out;
}

std::vector<std::size_t> inverse_involution(const CompositionTable& t) {
  std::vector<std::size_t> out(t.arrows.size(), kNone);
  for (std::size_t f = 0; f < t.arrows.size(); ++f) {
    std::size_t a = t.arrows[f].dom, b = t.arrows[f].cod;
    for (std::size_t g : t.hom(b, a)) {
      if (t.then(f, g) == t.identity[a] && t.then(g, f) == t.identity[b]) out[f] = g;
    }
    if (out[f] == kNone) throw InputError("arrow '" + t.arrows[f].name + "' has no inverse");
  }
  return out;
}

std::vector<std::size_t> identity_involution(const CompositionTable& t) {
  std::vector<std::size_t> out(t.arrows.size());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

Structure total_e_structure() {
  CompositionTable t;
  t.objects = {"x", "y"};
  t.arrows = {{"1x", 0, 0}, {"1y", 1, 1}, {"f", 0, 1}, {"g", 0, 1}};
  t.identity = {0, 1};
  Builder b(builtin_signature("cat+E"), "total-E");
  for (const auto& o : t.objects) b.add("O", o);
  for (const auto& a : t.arrows) b.add("A", a.name, {{"d", id(a.dom)}, {"c", id(a.cod)}});
  std::size_t n = t.arrows.size();
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) {
      if (t.arrows[f].cod != t.arrows[g].dom) continue;
      for (std::size_t h : t.hom(t.arrows[f].dom, t.arrows[g].cod)) {
        b.add("T", "t(" + t.arrows[f].name + "," + t.arrows[g].name + "," + t.arrows[h].name + ")",
              {{"t0", id(f)}, {"t1", id(g)}, {"t2", id(h)}});
      }
    }
  }
  for (std::size_t x = 0; x < 2; ++x) {
    b.add("I", "i(" + t.arrows[t.identity[x]].name + ")", {{"i", id(t.identity[x])}});
  }
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) {
      if (t.arrows[f].dom != t.arrows[g].dom || t.arrows[f].cod != t.arrows[g].cod) continue;
      b.add("E", "e(" + t.arrows[f].name + "," + t.arrows[g].name + ")",
            {{"e1", id(f)}, {"e2", id(g)}});
    }
  }
  return b.build();
}

std::string yoneda_image(const Indiscernibility& phi, const Structure& m,
                         const std::string& arrow_sort, const std::string& codomain,
                         ElemId identity) {
  const auto& s = m.signature();
  SortId k = s.sort(arrow_sort);
  auto cg = s.find_generator(k, codomain);
  if (!cg) throw InputError("sort '" + arrow_sort + "' has no generator '" + codomain + "'");
  Arrow cod = s.generator_arrow(*cg);
  const auto& ctx = *phi.context;
  Boundary alpha;
  for (const auto& entry : s.fanout(k, 0)) {
    alpha.push_back(entry.arrow == cod ? ctx.joker : m.act(entry.arrow, identity));
  }
  SortId t = ctx.dsig->find(k, alpha);
  auto x = phi.from->find_element(t, m.element_name(k, identity));
  if (!x) throw InputError("identity is not in the expected derived sort");
  return phi.to->element_name(t, phi.apply(t, *x));
}

// ---------------------------------------------------------------------------
// Binary relations.
// ---------------------------------------------------------------------------

Structure relation_m() {
  Builder b(builtin_signature("binrel"), "rel-M");
  b.add("A", "a");
  b.add("A", "b");
  return b.build();
}

Structure relation_n() {
  Builder b(builtin_signature("binrel"), "rel-N");
  b.add("A", "a");
  b.add("A", "b");
  b.add("A", "c");
  b.add("R", "r(a,c)", {{"x", 0}, {"y", 2}});
  return b.build();
}

StructureMorphism relation_inclusion() { return {{{0, 1}, {}}}; }

// ---------------------------------------------------------------------------
// Multicategories.
// ---------------------------------------------------------------------------

namespace {

/// Records g(f1, ..., fn) for every shape multicat2 has a sort for.
template <class Compose>
void fill_multi(MultiTable& t, Compose compose) {
  auto arity = [&](std::size_t op) { return t.ops[op].inputs.size(); };
  std::size_t n = t.ops.size();
  for (std::size_t g = 0; g < n; ++g) {
    const auto& in = t.ops[g].inputs;
    if (arity(g) == 1) {
      for (std::size_t f = 0; f < n; ++f) {
        if (arity(f) <= 2 && t.ops[f].output == in[0]) t.comp[{g, {f}}] = compose(g, {f});
      }
    } else if (arity(g) == 2) {
      for (std::size_t f1 = 0; f1 < n; ++f1) {
        for (std::size_t f2 = 0; f2 < n; ++f2) {
          if (arity(f1) != arity(f2) || arity(f1) > 1) continue;
          if (t.ops[f1].output != in[0] || t.ops[f2].output != in[1]) continue;
          t.comp[{g, {f1, f2}}] = compose(g, {f1, f2});
        }
      }
    }
  }
}

std::string multi_name(const std::vector<std::string>& objects,
                       const std::vector<std::size_t>& inputs, std::size_t output) {
  std::string s = "u(";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) s += ",";
    s += objects[inputs[i]];
  }
  return s + ";" + objects[output] + ")";
}

}  // namespace

MultiTable thin_multicategory(std::string name, std::vector<std::string> objects,
                              const std::vector<std::vector<bool>>& leq) {
  MultiTable t;
  t.name = std::move(name);
  t.objects = std::move(objects);
  std::size_t n = t.objects.size();
  std::map<std::pair<std::vector<std::size_t>, std::size_t>, std::size_t> index;
  auto add = [&](std::vector<std::size_t> in, std::size_t out) {
    index[{in, out}] = t.ops.size();
    t.ops.push_back({multi_name(t.objects, in, out), std::move(in), out});
  };
  for (std::size_t y = 0; y < n; ++y) add({}, y);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (leq.at(x).at(y)) add({x}, y);
    }
  }
  for (std::size_t x1 = 0; x1 < n; ++x1) {
    for (std::size_t x2 = 0; x2 < n; ++x2) {
      for (std::size_t y = 0; y < n; ++y) {
        if (leq[x1][y] && leq[x2][y]) add({x1, x2}, y);
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) t.identity.push_back(index.at({{x}, x}));
  fill_multi(t, [&](std::size_t g, const std::vector<std::size_t>& fs) {
    std::vector<std::size_t> in;
    for (auto f : fs) in.insert(in.end(), t.ops[f].inputs.begin(), t.ops[f].inputs.end());
    auto it = index.find({in, t.ops[g].output});
    if (it == index.end()) throw InputError("preorder is not transitive");
    return it->second;
  });
  return t;
}

MultiTable monoid_multicategory(std::string name, std::vector<std::string> names,
                                const std::vector<std::vector<std::size_t>>& mult) {
  MultiTable t;
  t.name = std::move(name);
  t.objects = {"*"};
  std::size_t m = names.size();
  for (std::size_t arity = 0; arity <= 2; ++arity) {
    for (std::size_t v = 0; v < m; ++v) {
      t.ops.push_back({names[v] + "_" + std::to_string(arity),
                       std::vector<std::size_t>(arity, 0), 0});
    }
  }
  t.identity = {m};
  fill_multi(t, [&](std::size_t g, const std::vector<std::size_t>& fs) {
    std::size_t v = g % m, arity = 0;
    for (auto f : fs) {
      v = mult.at(v).at(f % m);
      arity += t.ops[f].inputs.size();
    }
    return arity * m + v;
  });
  return t;
}

Structure multicategory_structure(const MultiTable& t) {
  Builder b(builtin_signature("multicat2"), t.name);
  for (const auto& o : t.objects) b.add("O", o);
  std::vector<ElemId> local(t.ops.size());
  const char* sorts[] = {"A0", "A1", "A2"};
  const char* inputs[] = {"i1", "i2"};
  for (std::size_t op = 0; op < t.ops.size(); ++op) {
    const auto& o = t.ops[op];
    std::vector<std::pair<std::string, ElemId>> images;
    for (std::size_t i = 0; i < o.inputs.size(); ++i) images.emplace_back(inputs[i], id(o.inputs[i]));
    images.emplace_back("c", id(o.output));
    local[op] = b.add(sorts[o.inputs.size()], o.name, images);
  }
  for (const auto& [key, h] : t.comp) {
    const auto& [g, fs] = key;
    std::string name = "t(";
    for (std::size_t i = 0; i < fs.size(); ++i) name += (i ? "," : "") + t.ops[fs[i]].name;
    name += ";" + t.ops[g].name + ")";
    std::size_t fa = t.ops[fs[0]].inputs.size();
    std::string sort;
    std::vector<std::pair<std::string, ElemId>> images{{"g", local[g]}, {"h", local[h]}};
    if (fs.size() == 1) {
      sort = fa == 0 ? "T01" : fa == 1 ? "T11" : "T21";
      images.emplace_back("f", local[fs[0]]);
    } else {
      sort = fa == 0 ? "T002" : "T112";
      images.emplace_back("f1", local[fs[0]]);
      images.emplace_back("f2", local[fs[1]]);
    }
    b.add(sort, name, images);
  }
  for (std::size_t x = 0; x < t.objects.size(); ++x) {
    b.add("I", "i(" + t.ops[t.identity[x]].name + ")", {{"i", local[t.identity[x]]}});
  }
  const char* eqs[] = {"E0", "E1", "E2"};
  for (std::size_t op = 0; op < t.ops.size(); ++op) {
    b.add(eqs[t.ops[op].inputs.size()], "e(" + t.ops[op].name + ")",
          {{"e1", local[op]}, {"e2", local[op]}});
  }
  return b.build();
}

std::vector<std::size_t> oracle_multi_isos(const MultiTable& t, std::size_t a, std::size_t b) {
  std::vector<std::size_t> out;
  auto unary = [&](std::size_t op, std::size_t x, std::size_t y) {
    return t.ops[op].inputs.size() == 1 && t.ops[op].inputs[0] == x && t.ops[op].output == y;
  };
  for (std::size_t f = 0; f < t.ops.size(); ++f) {
    if (!unary(f, a, b)) continue;
    for (std::size_t g = 0; g < t.ops.size(); ++g) {
      if (!unary(g, b, a)) continue;
      if (t.comp.at({g, {f}}) == t.identity[a] && t.comp.at({f, {g}}) == t.identity[b]) {
        out.push_back(f);
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mutations and shipped structures.
// ---------------------------------------------------------------------------

std::vector<Mutation> composition_mutations(const CompositionTable& t) {
  Structure base = category_from_table(t);
  const auto& s = base.signature();
  SortId tt = s.sort("T");
  std::vector<std::vector<std::string>> elements(s.sort_count());
  std::vector<std::vector<ElemId>> actions(s.generator_count());
  for (SortId k = 0; k < s.sort_count(); ++k) elements[k] = base.elements(k);
  for (GenId g = 0; g < s.generator_count(); ++g) actions[g] = base.action(g);
  auto tgens = s.generators_of(tt);
  GenId t0 = tgens[0], t1 = tgens[1], t2 = tgens[2];

  std::vector<Mutation> out;
  auto emit = [&](std::string what, std::vector<std::vector<std::string>> el,
                  std::vector<std::vector<ElemId>> ac, bool still) {
    out.push_back({std::move(what),
                   Structure(base.signature_ptr(), base.name() + "~" + std::to_string(out.size()),
                             std::move(el), std::move(ac)),
                   still});
  };
  const auto& names = base.elements(tt);
  for (ElemId e = 0; e < base.size(tt); ++e) {
    auto el = elements;
    auto ac = actions;
    el[tt].erase(el[tt].begin() + e);
    for (GenId g : tgens) ac[g].erase(ac[g].begin() + e);
    emit("delete " + names[e], std::move(el), std::move(ac), false);
  }
  for (ElemId e = 0; e < base.size(tt); ++e) {
    std::size_t f = base.act(t0, e), g = base.act(t1, e), h = base.act(t2, e);
    for (std::size_t h2 : t.hom(t.arrows[f].dom, t.arrows[g].cod)) {
      if (h2 == h) continue;
      std::string triple =
          "t(" + t.arrows[f].name + "," + t.arrows[g].name + "," + t.arrows[h2].name + ")";
      auto el = elements;
      auto ac = actions;
      el[tt].push_back(triple);
      ac[t0].push_back(id(f));
      ac[t1].push_back(id(g));
      ac[t2].push_back(id(h2));
      emit("add " + triple, std::move(el), std::move(ac), false);

      el = elements;
      ac = actions;
      el[tt][e] = triple;
      ac[t2][e] = id(h2);
      CompositionTable changed = t;
      changed.comp[f][g] = h2;
      emit("overwrite " + names[e] + " with " + triple, std::move(el), std::move(ac),
           changed.validate().ok());
    }
  }
  return out;
}

std::vector<std::pair<std::string, Structure>> shipped_structures() {
  std::vector<std::pair<std::string, Structure>> out;
  auto add_table = [&](std::string name, CompositionTable t) {
    t.name = name;
    out.emplace_back(name, category_from_table(t));
  };
  add_table("z2", cyclic_group(2, {"e", "g"}));
  add_table("walking-arrow", walking_arrow());
  add_table("walking-iso", walking_iso());
  add_table("parallel-pair", parallel_pair());
  add_table("linear-order-3", linear_order(3));
  add_table("discrete-3", discrete_category(3));
  auto z4 = cyclic_group(4);
  out.emplace_back("dagger-Z4", dagger_from_involution(z4, identity_involution(z4), "dagger-Z4"));
  out.emplace_back("dagger-Z4-inv",
                   dagger_from_involution(z4, inverse_involution(z4), "dagger-Z4-inv"));
  out.emplace_back("total-E", total_e_structure());
  out.emplace_back("rel-M", relation_m());
  out.emplace_back("rel-N", relation_n());
  std::vector<std::vector<bool>> pre{{true, true, true}, {true, true, true}, {false, false, true}};
  out.emplace_back("multicat-thin",
                   multicategory_structure(thin_multicategory("multicat-thin", {"x", "y", "z"}, pre)));
  out.emplace_back("multicat-Z2", multicategory_structure(monoid_multicategory(
                                      "multicat-Z2", {"e", "g"}, {{0, 1}, {1, 0}})));
  return out;
}

// ---------------------------------------------------------------------------
// Random generators.
// ---------------------------------------------------------------------------

namespace gen {

namespace {

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

Signature random_signature(Rng& rng, std::size_t max_height, std::size_t max_sorts,
                           const std::string& name) {
  std::size_t height = uniform(rng, 1, std::max<std::size_t>(1, max_height));
  std::size_t count = uniform(rng, height, std::max(height, max_sorts));
  std::vector<std::size_t> ranks(count);
  for (std::size_t i = 0; i < count; ++i) ranks[i] = i < height ? i : uniform(rng, 0, height - 1);
  std::sort(ranks.begin(), ranks.end());

  SignatureDecl d;
  d.name = name;
  for (std::size_t i = 0; i < count; ++i) {
    SortDecl sd;
    sd.id = "S" + std::to_string(i);
    sd.rank = ranks[i];
    if (ranks[i] > 0) {
      std::vector<std::size_t> lower;
      for (std::size_t j = 0; j < i; ++j) {
        if (ranks[j] < ranks[i]) lower.push_back(j);
      }
      std::size_t gens = uniform(rng, 1, 3);
      for (std::size_t g = 0; g < gens; ++g) {
        auto target = lower[uniform(rng, 0, lower.size() - 1)];
        sd.generators.push_back({"g" + std::to_string(g), d.sorts[target].id, std::nullopt});
      }
    }
    d.sorts.push_back(std::move(sd));
  }
  // Equations between length-2 paths sharing their endpoints.
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < count; ++i) index[d.sorts[i].id] = i;
  for (std::size_t i = 0; i < count; ++i) {
    if (ranks[i] < 2 || uniform(rng, 0, 2) != 0) continue;
    std::map<std::string, std::vector<std::vector<std::string>>> by_target;
    for (const auto& g : d.sorts[i].generators) {
      for (const auto& h : d.sorts[index[g.target]].generators) {
        by_target[h.target].push_back({h.label, g.label});
      }
    }
    std::vector<const std::vector<std::vector<std::string>>*> groups;
    for (const auto& [target, paths] : by_target) {
      if (paths.size() >= 2) groups.push_back(&paths);
    }
    if (groups.empty()) continue;
    const auto& paths = *groups[uniform(rng, 0, groups.size() - 1)];
    std::size_t x = uniform(rng, 0, paths.size() - 1);
    std::size_t y = uniform(rng, 0, paths.size() - 2);
    if (y >= x) ++y;
    d.equations.push_back({d.sorts[i].id, paths[x], paths[y], std::nullopt});
  }
  return Signature::from_decl(d);
}

BottomFamily random_family(Rng& rng, const Signature& sig, std::size_t max_elements) {
  BottomFamily fam;
  fam.members.resize(sig.sort_count());
  for (SortId k = 0; k < sig.sort_count(); ++k) {
    if (sig.rank(k) != 0) continue;
    std::size_t n = uniform(rng, 0, max_elements);
    for (std::size_t i = 0; i < n; ++i) fam.members[k].push_back(letter_name(i));
  }
  return fam;
}

Structure random_structure(Rng& rng, SignaturePtr sigp, std::size_t max_elements,
                           const std::string& name) {
  const auto& s = *sigp;
  std::vector<std::vector<std::string>> elements(s.sort_count());
  std::vector<std::vector<ElemId>> actions(s.generator_count());
  std::vector<SortId> order(s.sort_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](SortId a, SortId b) { return s.rank(a) < s.rank(b); });
  auto act_path = [&](const Path& p, const std::vector<ElemId>& images) {
    ElemId v = images[s.local_index(p.steps[0])];
    for (std::size_t i = 1; i < p.steps.size(); ++i) v = actions[p.steps[i]][v];
    return v;
  };
  for (SortId k : order) {
    if (s.rank(k) == 0) {
      elements[k] = numbered_names(uniform(rng, 1, max_elements), "x");
      continue;
    }
    auto gens = s.generators_of(k);
    std::vector<std::vector<ElemId>> compatible;
    std::vector<ElemId> images(gens.size(), 0);
    std::function<void(std::size_t)> walk = [&](std::size_t i) {
      if (i == gens.size()) {
        for (const auto& eq : s.equations()) {
          if (eq.lhs.source == k && act_path(eq.lhs, images) != act_path(eq.rhs, images)) return;
        }
        compatible.push_back(images);
        return;
      }
      SortId target = s.generator(gens[i]).target;
      for (ElemId v = 0; v < elements[target].size(); ++v) {
        images[i] = v;
        walk(i + 1);
      }
    };
    walk(0);
    if (compatible.empty()) continue;
    std::size_t n = uniform(rng, 0, max_elements);
    for (std::size_t e = 0; e < n; ++e) {
      const auto& pick = compatible[uniform(rng, 0, compatible.size() - 1)];
      elements[k].push_back("e" + std::to_string(e));
      for (std::size_t i = 0; i < gens.size(); ++i) actions[gens[i]].push_back(pick[i]);
    }
  }
  return Structure::checked(sigp, name, std::move(elements), std::move(actions));
}

std::optional<FamilyMap> random_family_map(Rng& rng, const SigMorphism& h,
                                           const BottomFamily& from, const BottomFamily& to) {
  const auto& s = *h.source;
  FamilyMap out(s.sort_count());
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (s.rank(k) != 0) continue;
    std::size_t n = from.members[k].size();
    std::size_t m = to.members[h.sort_map[k]].size();
    if (n > 0 && m == 0) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) out[k].push_back(id(uniform(rng, 0, m - 1)));
  }
  return out;
}

SigMorphism renaming(const SignaturePtr& sig, const std::string& suffix) {
  const auto& s = *sig;
  std::vector<Signature::SortSpec> specs;
  for (SortId k = 0; k < s.sort_count(); ++k) {
    Signature::SortSpec spec{s.sort_name(k) + suffix, s.rank(k), {}};
    for (GenId g : s.generators_of(k)) {
      spec.generators.emplace_back(s.generator(g).label + suffix, s.generator(g).target);
    }
    specs.push_back(std::move(spec));
  }
  auto target = std::make_shared<const Signature>(s.name() + suffix, std::move(specs),
                                                  s.equations(), s.height());
  SigMorphism h{sig, target, {}, {}};
  for (SortId k = 0; k < s.sort_count(); ++k) h.sort_map.push_back(k);
  for (GenId g = 0; g < s.generator_count(); ++g) h.gen_map.push_back(target->generator_arrow(g));
  return h;
}

SigMorphism fold(const SignaturePtr& sig) {
  const auto& s = *sig;
  auto n = static_cast<SortId>(s.sort_count());
  auto gcount = static_cast<GenId>(s.generator_count());
  std::vector<Signature::SortSpec> specs;
  for (SortId copy = 0; copy < 2; ++copy) {
    for (SortId k = 0; k < n; ++k) {
      Signature::SortSpec spec{s.sort_name(k) + "_" + std::to_string(copy + 1), s.rank(k), {}};
      for (GenId g : s.generators_of(k)) {
        spec.generators.emplace_back(s.generator(g).label, s.generator(g).target + copy * n);
      }
      specs.push_back(std::move(spec));
    }
  }
  std::vector<Signature::Equation> eqs = s.equations();
  for (const auto& eq : s.equations()) {
    auto shift = [&](Path p) {
      p.source += n;
      for (auto& g : p.steps) g += gcount;
      return p;
    };
    eqs.push_back({shift(eq.lhs), shift(eq.rhs)});
  }
  auto source = std::make_shared<const Signature>(s.name() + "+" + s.name(), std::move(specs),
                                                  std::move(eqs), s.height());
  SigMorphism h{source, sig, {}, {}};
  for (SortId k = 0; k < 2 * n; ++k) h.sort_map.push_back(k % n);
  for (GenId g = 0; g < 2 * gcount; ++g) h.gen_map.push_back(s.generator_arrow(g % gcount));
  return h;
}

SigMorphism down_closed_inclusion(Rng& rng, const SignaturePtr& sig) {
  const auto& s = *sig;
  std::vector<bool> keep(s.sort_count(), false);
  std::vector<SortId> stack{static_cast<SortId>(uniform(rng, 0, s.sort_count() - 1))};
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (uniform(rng, 0, 2) == 0) stack.push_back(k);
  }
  while (!stack.empty()) {
    SortId k = stack.back();
    stack.pop_back();
    if (keep[k]) continue;
    keep[k] = true;
    for (GenId g : s.generators_of(k)) stack.push_back(s.generator(g).target);
  }
  std::vector<SortId> new_sort(s.sort_count(), 0);
  std::vector<GenId> new_gen(s.generator_count(), 0);
  std::vector<SortId> sort_map;
  std::vector<GenId> gen_back;
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (!keep[k]) continue;
    new_sort[k] = static_cast<SortId>(sort_map.size());
    sort_map.push_back(k);
    for (GenId g : s.generators_of(k)) {
      new_gen[g] = static_cast<GenId>(gen_back.size());
      gen_back.push_back(g);
    }
  }
  std::vector<Signature::SortSpec> specs;
  for (SortId k : sort_map) {
    Signature::SortSpec spec{s.sort_name(k), s.rank(k), {}};
    for (GenId g : s.generators_of(k)) {
      spec.generators.emplace_back(s.generator(g).label, new_sort[s.generator(g).target]);
    }
    specs.push_back(std::move(spec));
  }
  std::vector<Signature::Equation> eqs;
  for (const auto& eq : s.equations()) {
    if (!keep[eq.lhs.source]) continue;
    auto remap = [&](Path p) {
      p.source = new_sort[p.source];
      for (auto& g : p.steps) g = new_gen[g];
      return p;
    };
    eqs.push_back({remap(eq.lhs), remap(eq.rhs)});
  }
  auto source = std::make_shared<const Signature>(s.name() + "|sub", std::move(specs),
                                                  std::move(eqs));
  SigMorphism h{source, sig, sort_map, {}};
  for (GenId g : gen_back) h.gen_map.push_back(s.generator_arrow(g));
  return h;
}

std::pair<Structure, StructureMorphism> shuffled_copy(Rng& rng, const Structure& m,
                                                      const std::string& suffix) {
  const auto& s = m.signature();
  StructureMorphism iso;
  std::vector<std::vector<std::string>> elements(s.sort_count());
  for (SortId k = 0; k < s.sort_count(); ++k) {
    std::vector<ElemId> perm(m.size(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    elements[k].resize(m.size(k));
    for (ElemId e = 0; e < m.size(k); ++e) elements[k][perm[e]] = m.element_name(k, e) + suffix;
    iso.maps.push_back(std::move(perm));
  }
  std::vector<std::vector<ElemId>> actions(s.generator_count());
  for (GenId g = 0; g < s.generator_count(); ++g) {
    const auto& gen = s.generator(g);
    actions[g].resize(m.size(gen.source));
    for (ElemId e = 0; e < m.size(gen.source); ++e) {
      actions[g][iso.maps[gen.source][e]] = iso.maps[gen.target][m.act(g, e)];
    }
  }
  return {Structure(m.signature_ptr(), m.name() + suffix, std::move(elements), std::move(actions)),
          std::move(iso)};
}

PulledBack pullback_along_bottom(const Structure& n, const BottomFamily& m0, const FamilyMap& f0) {
  const auto& sigp = n.signature_ptr();
  const auto& s = *sigp;
  auto dn = derive_structure(n);
  auto dmsig = derive_signature(sigp, m0);
  auto beta = derived_morphism(SigMorphism::identity(sigp), *dmsig, *dn.dsig, f0);
  Structure mprime = pullback_structure(beta, *dn.structure);
  Structure m = integrate(*dmsig, mprime, n.name() + "*");
  auto dm = derive_structure(m, dmsig);
  StructureMorphism f;
  f.maps.resize(s.sort_count());
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (s.rank(k) == 0) {
      f.maps[k] = f0[k];
      continue;
    }
    for (ElemId x = 0; x < m.size(k); ++x) {
      auto [t, i] = dm.placement[k][x];
      f.maps[k].push_back(dn.origin[beta.sort_map[t]][i]);
    }
  }
  return {std::move(m), std::move(f)};
}

}  // namespace gen

}  // namespace folds

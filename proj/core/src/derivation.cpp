#include "foldskit/derivation.hpp"

#include <algorithm>
#include <set>

namespace folds {

namespace {

/// Position of each arrow out of K (by class index) within fanout(K, 0).
std::vector<std::size_t> fanout0_positions(const Signature& s, SortId k) {
  std::vector<std::size_t> pos(s.arrows_from(k).size(), SIZE_MAX);
  if (s.rank(k) == 0) return pos;
  auto fan = s.fanout(k, 0);
  for (std::size_t i = 0; i < fan.size(); ++i) pos[fan[i].arrow.index] = i;
  return pos;
}

bool same_signature(const SignaturePtr& a, const SignaturePtr& b) {
  return a == b || (a && b && *a == *b);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

BottomFamily bottom_family(const Structure& m) {
  BottomFamily fam;
  const auto& s = m.signature();
  fam.members.resize(s.sort_count());
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (s.rank(k) == 0) fam.members[k] = m.elements(k);
  }
  return fam;
}

BottomFamily parse_family(const Signature& sig, const std::string& text) {
  BottomFamily fam;
  fam.members.resize(sig.sort_count());
  std::set<SortId> seen;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(';', start);
    if (end == std::string::npos) end = text.size();
    std::string part = trim(text.substr(start, end - start));
    start = end + 1;
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos) throw InputError("family entry '" + part + "' lacks '='");
    std::string sort = trim(part.substr(0, eq));
    std::string body = trim(part.substr(eq + 1));
    if (body.size() < 2 || body.front() != '{' || body.back() != '}') {
      throw InputError("family entry for '" + sort + "' must look like " + sort + "={a,b}");
    }
    auto k = sig.find_sort(sort);
    if (!k) throw InputError("family names unknown sort '" + sort + "'");
    if (sig.rank(*k) != 0) throw InputError("family sort '" + sort + "' does not have rank 0");
    if (!seen.insert(*k).second) throw InputError("family gives sort '" + sort + "' twice");
    body = body.substr(1, body.size() - 2);
    std::set<std::string> names;
    std::size_t p = 0;
    while (p <= body.size() && !trim(body).empty()) {
      auto comma = body.find(',', p);
      if (comma == std::string::npos) comma = body.size();
      std::string name = trim(body.substr(p, comma - p));
      p = comma + 1;
      if (name.empty()) throw InputError("empty element name in family for '" + sort + "'");
      if (!names.insert(name).second) {
        throw InputError("duplicate element '" + name + "' in family for '" + sort + "'");
      }
      fam.members[*k].push_back(name);
      if (comma == body.size()) break;
    }
  }
  return fam;
}

std::pair<BottomFamily, ElemId> joker_extend(const Signature& sig, BottomFamily fam, SortId k) {
  if (k >= sig.sort_count() || sig.rank(k) != 0) {
    throw InputError("joker_extend: sort must have rank 0");
  }
  fam.members.resize(sig.sort_count());
  auto& at = fam.members[k];
  std::string name = kJoker;
  for (int i = 1; std::find(at.begin(), at.end(), name) != at.end(); ++i) {
    name = kJoker + std::to_string(i);
  }
  at.push_back(name);
  return {std::move(fam), static_cast<ElemId>(at.size() - 1)};
}

std::string derived_sort_name(const std::string& parent, const std::vector<std::string>& values) {
  std::string out = parent + "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    const auto& v = values[i];
    bool plain = !v.empty() && v.find_first_of("(),\" \t\r\n\\") == std::string::npos;
    if (plain) {
      out += v;
    } else {
      out += '"';
      for (char c : v) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
    }
  }
  return out + ")";
}

SortId DerivedSignature::find(SortId p, const Boundary& a) const {
  auto it = index.find({p, a});
  if (it == index.end()) {
    throw InputError("no derived sort over '" + base->sort_name(p) + "' with that boundary");
  }
  return it->second;
}

Boundary DerivedSignature::transport(SortId p, const Boundary& a, const Arrow& f) const {
  auto pos = fanout0_positions(*base, p);
  Boundary beta;
  for (const auto& entry : base->fanout(f.target, 0)) {
    beta.push_back(a[pos[base->compose(f, entry.arrow).index]]);
  }
  return beta;
}

Path DerivedSignature::lift(SortId from, const Path& p) const {
  Path out{from, {}};
  SortId cur = from;
  for (GenId g : p.steps) {
    std::optional<GenId> found;
    for (GenId dg : sig->generators_of(cur)) {
      if (lifted_from[dg] == g) found = dg;
    }
    if (!found) {
      throw InputError("cannot lift '" + base->generator(g).label + "' to derived sort '" +
                       sig->sort_name(cur) + "'");
    }
    out.steps.push_back(*found);
    cur = sig->generator(*found).target;
  }
  return out;
}

DerivedSignaturePtr derive_signature(SignaturePtr sigp, const BottomFamily& fam,
                                     std::uint64_t max_sorts) {
  if (!sigp) throw InputError("derive_signature: no signature");
  const Signature& s = *sigp;
  if (fam.members.size() != s.sort_count()) {
    throw InputError("derive_signature: family must list every sort of '" + s.name() + "'");
  }
  auto d = std::make_shared<DerivedSignature>();
  d->base = sigp;
  d->family = fam;

  std::vector<Signature::SortSpec> specs;
  std::uint64_t total = 0;
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (s.rank(k) == 0) continue;
    auto fan = s.fanout(k, 0);
    std::uint64_t count = 1;
    for (const auto& e : fan) {
      count *= fam.members[e.target].size();
      if (count > max_sorts) break;
    }
    total += count;
    if (total > max_sorts) throw BudgetExhausted("derived signature size", max_sorts);
    if (count == 0) continue;

    Boundary alpha(fan.size(), 0);
    for (bool more = true; more;) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < fan.size(); ++i) {
        names.push_back(fam.members[fan[i].target][alpha[i]]);
      }
      auto id = static_cast<SortId>(specs.size());
      specs.push_back({derived_sort_name(s.sort_name(k), names), s.rank(k) - 1, {}});
      d->parent.push_back(k);
      d->alpha.push_back(alpha);
      d->index.emplace(std::make_pair(k, alpha), id);
      // Odometer: the last position turns fastest.
      more = false;
      for (std::size_t i = fan.size(); i-- > 0;) {
        if (++alpha[i] < fam.members[fan[i].target].size()) {
          more = true;
          break;
        }
        alpha[i] = 0;
      }
    }
  }

  for (SortId ds = 0; ds < specs.size(); ++ds) {
    SortId k = d->parent[ds];
    for (GenId g : s.generators_of(k)) {
      const auto& gen = s.generator(g);
      if (s.rank(gen.target) == 0) continue;
      Boundary beta = d->transport(k, d->alpha[ds], s.generator_arrow(g));
      specs[ds].generators.emplace_back(gen.label, d->find(gen.target, beta));
      d->lifted_from.push_back(g);
    }
  }

  // Lift equations before the signature exists: walk generator labels.
  std::vector<Signature::Equation> equations;
  std::vector<GenId> first_gen(specs.size(), 0);
  {
    GenId next = 0;
    for (SortId ds = 0; ds < specs.size(); ++ds) {
      first_gen[ds] = next;
      next += static_cast<GenId>(specs[ds].generators.size());
    }
  }
  auto lift_path = [&](SortId from, const Path& p) {
    Path out{from, {}};
    SortId cur = from;
    for (GenId g : p.steps) {
      for (GenId i = 0; i < specs[cur].generators.size(); ++i) {
        if (d->lifted_from[first_gen[cur] + i] == g) {
          out.steps.push_back(first_gen[cur] + i);
          cur = specs[cur].generators[i].second;
          break;
        }
      }
    }
    return out;
  };
  for (const auto& eq : s.equations()) {
    SortId target = s.generator(eq.lhs.steps.back()).target;
    if (s.rank(target) == 0) continue;
    for (SortId ds = 0; ds < specs.size(); ++ds) {
      if (d->parent[ds] != eq.lhs.source) continue;
      equations.push_back({lift_path(ds, eq.lhs), lift_path(ds, eq.rhs)});
    }
  }

  std::size_t height = s.height() > 0 ? s.height() - 1 : 0;
  d->sig = std::make_shared<Signature>(s.name() + "/fam", std::move(specs), std::move(equations),
                                       height);
  return d;
}

DerivedStructure derive_structure(const Structure& m, std::uint64_t max_sorts) {
  return derive_structure(m, derive_signature(m.signature_ptr(), bottom_family(m), max_sorts));
}

DerivedStructure derive_structure(const Structure& m, DerivedSignaturePtr dsig) {
  const auto& s = m.signature();
  if (!same_signature(dsig->base, m.signature_ptr()) || !(dsig->family == bottom_family(m))) {
    throw InputError("derive_structure: derived signature was built for different data");
  }
  DerivedStructure out;
  out.dsig = dsig;
  const auto& ds = *dsig->sig;
  out.origin.resize(ds.sort_count());
  out.placement.resize(s.sort_count());
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (s.rank(k) == 0) continue;
    out.placement[k].resize(m.size(k));
    for (ElemId e = 0; e < m.size(k); ++e) {
      SortId target = dsig->find(k, m.boundary(k, e, 0));
      out.placement[k][e] = {target, static_cast<ElemId>(out.origin[target].size())};
      out.origin[target].push_back(e);
    }
  }
  std::vector<std::vector<std::string>> names(ds.sort_count());
  for (SortId t = 0; t < ds.sort_count(); ++t) {
    for (ElemId e : out.origin[t]) names[t].push_back(m.element_name(dsig->parent[t], e));
  }
  std::vector<std::vector<ElemId>> actions(ds.generator_count());
  for (GenId dg = 0; dg < ds.generator_count(); ++dg) {
    SortId src = ds.generator(dg).source;
    GenId g = dsig->lifted_from[dg];
    SortId base_target = s.generator(g).target;
    for (ElemId e : out.origin[src]) {
      actions[dg].push_back(out.placement[base_target][m.act(g, e)].second);
    }
  }
  out.structure = std::make_shared<Structure>(dsig->sig, m.name() + "'", std::move(names),
                                              std::move(actions));
  return out;
}

Structure partial_structure(const DerivedSignature& jokered, const Structure& m, SortId k,
                            ElemId joker, ElemId a) {
  const auto& s = m.signature();
  if (!same_signature(jokered.base, m.signature_ptr())) {
    throw InputError("partial_structure: signature mismatch");
  }
  if (a >= m.size(k)) throw InputError("partial_structure: unknown element");
  const auto& ds = *jokered.sig;

  // Group each base carrier by rank-0 boundary; remember positions.
  std::vector<std::map<Boundary, std::vector<ElemId>>> groups(s.sort_count());
  std::vector<std::vector<ElemId>> pos(s.sort_count());
  for (SortId l = 0; l < s.sort_count(); ++l) {
    if (s.rank(l) == 0) continue;
    pos[l].resize(m.size(l));
    for (ElemId e = 0; e < m.size(l); ++e) {
      auto& g = groups[l][m.boundary(l, e, 0)];
      pos[l][e] = static_cast<ElemId>(g.size());
      g.push_back(e);
    }
  }
  static const std::vector<ElemId> kEmpty;
  std::vector<const std::vector<ElemId>*> carrier(ds.sort_count(), &kEmpty);
  std::vector<std::vector<std::string>> names(ds.sort_count());
  for (SortId t = 0; t < ds.sort_count(); ++t) {
    SortId l = jokered.parent[t];
    auto fan = s.fanout(l, 0);
    Boundary beta = jokered.alpha[t];
    for (std::size_t i = 0; i < fan.size(); ++i) {
      if (fan[i].target == k && beta[i] == joker) beta[i] = a;
    }
    auto it = groups[l].find(beta);
    if (it == groups[l].end()) continue;
    carrier[t] = &it->second;
    for (ElemId e : it->second) names[t].push_back(m.element_name(l, e));
  }
  std::vector<std::vector<ElemId>> actions(ds.generator_count());
  for (GenId dg = 0; dg < ds.generator_count(); ++dg) {
    SortId src = ds.generator(dg).source;
    GenId g = jokered.lifted_from[dg];
    SortId base_target = s.generator(g).target;
    for (ElemId e : *carrier[src]) actions[dg].push_back(pos[base_target][m.act(g, e)]);
  }
  return Structure(jokered.sig, m.name() + "@" + m.element_name(k, a), std::move(names),
                   std::move(actions));
}

Structure partial_structure(const Structure& m, SortId k, ElemId a) {
  auto [fam, joker] = joker_extend(m.signature(), bottom_family(m), k);
  auto d = derive_signature(m.signature_ptr(), fam);
  return partial_structure(*d, m, k, joker, a);
}

SigMorphism SigMorphism::identity(SignaturePtr sig) {
  SigMorphism h{sig, sig, {}, {}};
  for (SortId k = 0; k < sig->sort_count(); ++k) h.sort_map.push_back(k);
  for (GenId g = 0; g < sig->generator_count(); ++g) h.gen_map.push_back(sig->generator_arrow(g));
  return h;
}

Arrow SigMorphism::map_arrow(const Arrow& a) const {
  const auto& p = source->representative(a);
  Arrow out = gen_map.at(p.steps.front());
  for (std::size_t i = 1; i < p.steps.size(); ++i) {
    out = target->compose(out, gen_map.at(p.steps[i]));
  }
  return out;
}

SigMorphism SigMorphism::then(const SigMorphism& next) const {
  if (!same_signature(target, next.source)) {
    throw InputError("signature morphisms do not compose: codomain and domain differ");
  }
  SigMorphism out{source, next.target, {}, {}};
  for (SortId k : sort_map) out.sort_map.push_back(next.sort_map.at(k));
  for (const auto& a : gen_map) out.gen_map.push_back(next.map_arrow(a));
  return out;
}

ValidationReport SigMorphism::validate() const {
  ValidationReport r;
  if (!source || !target) {
    r.add("signature morphism lacks a source or target");
    return r;
  }
  if (sort_map.size() != source->sort_count()) r.add("sort map has the wrong size");
  if (gen_map.size() != source->generator_count()) r.add("generator map has the wrong size");
  if (!r.ok()) return r;
  for (SortId k = 0; k < sort_map.size(); ++k) {
    if (sort_map[k] >= target->sort_count()) {
      r.add("sort '" + source->sort_name(k) + "' maps outside the target");
    } else if (target->rank(sort_map[k]) != source->rank(k)) {
      r.add("sort '" + source->sort_name(k) + "' changes rank under the morphism");
    }
  }
  if (!r.ok()) return r;
  for (GenId g = 0; g < gen_map.size(); ++g) {
    const auto& gen = source->generator(g);
    const auto& a = gen_map[g];
    if (a.source != sort_map[gen.source] || a.target != sort_map[gen.target] ||
        a.index >= target->arrows_from(a.source).size()) {
      r.add("generator '" + gen.label + "' of '" + source->sort_name(gen.source) +
            "' maps to an arrow with the wrong endpoints");
    }
  }
  if (!r.ok()) return r;
  for (const auto& eq : source->equations()) {
    if (map_arrow(source->classify(eq.lhs)) != map_arrow(source->classify(eq.rhs))) {
      r.add("equation " + source->format_path(eq.lhs) + " = " + source->format_path(eq.rhs) +
            " is not preserved");
    }
  }
  return r;
}

bool SigMorphism::operator==(const SigMorphism& other) const {
  return same_signature(source, other.source) && same_signature(target, other.target) &&
         sort_map == other.sort_map && gen_map == other.gen_map;
}

bool is_discrete_opfibration(const SigMorphism& h) {
  const auto& s = *h.source;
  const auto& t = *h.target;
  for (SortId k = 0; k < s.sort_count(); ++k) {
    for (std::size_t m = 0; m < s.rank(k); ++m) {
      auto from = s.fanout(k, m);
      auto to = t.fanout(h.sort_map[k], m);
      if (from.size() != to.size()) return false;
      std::set<Arrow> images;
      for (const auto& e : from) images.insert(h.map_arrow(e.arrow));
      if (images.size() != to.size()) return false;
    }
  }
  return true;
}

Structure pullback_structure(const SigMorphism& alpha, const Structure& n) {
  if (!same_signature(alpha.target, n.signature_ptr())) {
    throw InputError("pullback: structure is not over the morphism's codomain");
  }
  auto report = alpha.validate();
  if (!report.ok()) throw InputError(report.entries);
  const auto& s = *alpha.source;
  std::vector<std::vector<std::string>> names(s.sort_count());
  for (SortId k = 0; k < s.sort_count(); ++k) names[k] = n.elements(alpha.sort_map[k]);
  std::vector<std::vector<ElemId>> actions(s.generator_count());
  for (GenId g = 0; g < s.generator_count(); ++g) {
    SortId src = alpha.sort_map[s.generator(g).source];
    const auto& a = alpha.gen_map[g];
    for (ElemId e = 0; e < n.size(src); ++e) actions[g].push_back(n.act(a, e));
  }
  return Structure(alpha.source, n.name(), std::move(names), std::move(actions));
}

SigMorphism derived_morphism(const SigMorphism& h, const DerivedSignature& from,
                             const DerivedSignature& to, const FamilyMap& fmap) {
  if (!same_signature(from.base, h.source) || !same_signature(to.base, h.target)) {
    throw InputError("derived_morphism: derivatives are not over the morphism's endpoints");
  }
  auto report = h.validate();
  if (!report.ok()) throw InputError(report.entries);
  if (!is_discrete_opfibration(h)) {
    throw InputError("derived_morphism: the signature morphism is not a discrete opfibration");
  }
  const auto& s = *h.source;
  const auto& t = *h.target;
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (s.rank(k) != 0) continue;
    const auto& src = from.family.members[k];
    const auto& dst = to.family.members[h.sort_map[k]];
    if (fmap.size() <= k || fmap[k].size() != src.size()) {
      throw InputError("derived_morphism: family map is not defined on all of '" +
                       s.sort_name(k) + "'");
    }
    for (ElemId v : fmap[k]) {
      if (v >= dst.size()) throw InputError("derived_morphism: family map leaves its codomain");
    }
  }

  const auto& ds = *from.sig;
  SigMorphism out{from.sig, to.sig, {}, {}};
  for (SortId d = 0; d < ds.sort_count(); ++d) {
    SortId k = from.parent[d];
    SortId hk = h.sort_map[k];
    auto fan = s.fanout(k, 0);
    auto pos = fanout0_positions(t, hk);
    Boundary beta(fan.size(), 0);
    for (std::size_t i = 0; i < fan.size(); ++i) {
      beta[pos[h.map_arrow(fan[i].arrow).index]] = fmap[fan[i].target][from.alpha[d][i]];
    }
    out.sort_map.push_back(to.find(hk, beta));
  }
  for (GenId dg = 0; dg < ds.generator_count(); ++dg) {
    SortId d = ds.generator(dg).source;
    const Arrow& image = h.gen_map[from.lifted_from[dg]];
    out.gen_map.push_back(to.sig->classify(to.lift(out.sort_map[d], t.representative(image))));
  }
  return out;
}

PositivePart positive_part(const Signature& sig) {
  PositivePart out;
  std::vector<Signature::SortSpec> specs;
  for (SortId k = 0; k < sig.sort_count(); ++k) {
    if (sig.rank(k) == 0) continue;
    out.sort_of[k] = static_cast<SortId>(specs.size());
    specs.push_back({sig.sort_name(k), sig.rank(k) - 1, {}});
  }
  GenId next = 0;
  for (SortId k = 0; k < sig.sort_count(); ++k) {
    if (sig.rank(k) == 0) continue;
    for (GenId g : sig.generators_of(k)) {
      const auto& gen = sig.generator(g);
      if (sig.rank(gen.target) == 0) continue;
      specs[out.sort_of[k]].generators.emplace_back(gen.label, out.sort_of[gen.target]);
      out.gen_of[g] = next++;
    }
  }
  std::vector<Signature::Equation> equations;
  auto map_path = [&](const Path& p) {
    Path q{out.sort_of.at(p.source), {}};
    for (GenId g : p.steps) q.steps.push_back(out.gen_of.at(g));
    return q;
  };
  for (const auto& eq : sig.equations()) {
    if (sig.rank(sig.generator(eq.lhs.steps.back()).target) == 0) continue;
    equations.push_back({map_path(eq.lhs), map_path(eq.rhs)});
  }
  std::size_t height = sig.height() > 0 ? sig.height() - 1 : 0;
  out.sig = std::make_shared<Signature>(sig.name() + ">0", std::move(specs), std::move(equations),
                                        height);
  return out;
}

SigMorphism forgetful(const DerivedSignature& d, const PositivePart& pos) {
  SigMorphism u{d.sig, pos.sig, {}, {}};
  for (SortId ds = 0; ds < d.sig->sort_count(); ++ds) {
    u.sort_map.push_back(pos.sort_of.at(d.parent[ds]));
  }
  for (GenId dg = 0; dg < d.sig->generator_count(); ++dg) {
    u.gen_map.push_back(pos.sig->generator_arrow(pos.gen_of.at(d.lifted_from[dg])));
  }
  return u;
}

Structure integrate(const DerivedSignature& d, const Structure& derived, std::string name) {
  if (!same_signature(d.sig, derived.signature_ptr())) {
    throw InputError("integrate: structure is not over the derived signature");
  }
  const auto& s = *d.base;
  const auto& ds = *d.sig;
  std::vector<std::vector<std::string>> names(s.sort_count());
  std::vector<ElemId> offset(ds.sort_count(), 0);
  for (SortId k = 0; k < s.sort_count(); ++k) {
    if (s.rank(k) == 0) names[k] = d.family.members[k];
  }
  std::vector<std::map<std::string, int>> uses(s.sort_count());
  for (SortId t = 0; t < ds.sort_count(); ++t) {
    for (const auto& n : derived.elements(t)) ++uses[d.parent[t]][n];
  }
  for (SortId t = 0; t < ds.sort_count(); ++t) {
    SortId k = d.parent[t];
    offset[t] = static_cast<ElemId>(names[k].size());
    for (const auto& n : derived.elements(t)) {
      names[k].push_back(uses[k][n] > 1 ? n + "@" + ds.sort_name(t) : n);
    }
  }
  std::vector<std::vector<ElemId>> actions(s.generator_count());
  for (GenId g = 0; g < s.generator_count(); ++g) {
    actions[g].assign(names[s.generator(g).source].size(), 0);
  }
  for (SortId t = 0; t < ds.sort_count(); ++t) {
    SortId k = d.parent[t];
    auto pos = fanout0_positions(s, k);
    for (GenId g : s.generators_of(k)) {
      SortId target = s.generator(g).target;
      for (ElemId e = 0; e < derived.size(t); ++e) {
        if (s.rank(target) == 0) {
          actions[g][offset[t] + e] = d.alpha[t][pos[s.generator_arrow(g).index]];
        }
      }
    }
    for (GenId dg : ds.generators_of(t)) {
      GenId g = d.lifted_from[dg];
      SortId dt = ds.generator(dg).target;
      for (ElemId e = 0; e < derived.size(t); ++e) {
        actions[g][offset[t] + e] = offset[dt] + derived.act(dg, e);
      }
    }
  }
  return Structure::checked(d.base, std::move(name), std::move(names), std::move(actions));
}

}  // namespace folds

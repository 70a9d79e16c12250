#include "foldskit/structure.hpp"

#include <algorithm>

namespace folds {

namespace {

std::vector<std::size_t> position_in(const std::vector<FanoutEntry>& fan, std::size_t arrows) {
  std::vector<std::size_t> pos(arrows, SIZE_MAX);
  for (std::size_t i = 0; i < fan.size(); ++i) pos[fan[i].arrow.index] = i;
  return pos;
}

}  // namespace

std::vector<std::string> numbered_names(std::size_t n, const std::string& prefix) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Structure::Structure(SignaturePtr sig, std::string name,
                     std::vector<std::vector<std::string>> elements,
                     std::vector<std::vector<ElemId>> actions)
    : sig_(std::move(sig)),
      name_(std::move(name)),
      elements_(std::move(elements)),
      actions_(std::move(actions)) {
  if (!sig_) throw InputError("structure '" + name_ + "' has no signature");
  elements_.resize(sig_->sort_count());
  actions_.resize(sig_->generator_count());
  index_.resize(elements_.size());
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    for (ElemId e = 0; e < elements_[k].size(); ++e) index_[k].emplace(elements_[k][e], e);
  }
}

Structure Structure::checked(SignaturePtr sig, std::string name,
                             std::vector<std::vector<std::string>> elements,
                             std::vector<std::vector<ElemId>> actions) {
  Structure m(std::move(sig), std::move(name), std::move(elements), std::move(actions));
  auto report = validate_structure(m);
  if (!report.ok()) throw InputError(report.entries);
  return m;
}

Structure Structure::from_decl(SignaturePtr sig, const StructureDecl& decl) {
  if (!sig) throw InputError("structure '" + decl.name + "' has no signature");
  ValidationReport report;
  const auto& s = *sig;
  std::vector<std::vector<std::string>> elements(s.sort_count());
  std::vector<const CarrierDecl*> carrier_of(s.sort_count(), nullptr);
  for (const auto& c : decl.carriers) {
    auto k = s.find_sort(c.sort);
    if (!k) {
      report.add("unknown sort '" + c.sort + "' in structure '" + decl.name + "'", c.span);
      continue;
    }
    if (carrier_of[*k]) {
      report.add("carrier for sort '" + c.sort + "' given twice", c.span);
      continue;
    }
    carrier_of[*k] = &c;
    std::map<std::string, bool> seen;
    for (const auto& e : c.elements) {
      if (seen.count(e.name)) {
        report.add("duplicate element '" + e.name + "' in sort '" + c.sort + "'", e.span);
        continue;
      }
      seen[e.name] = true;
      elements[*k].push_back(e.name);
    }
  }
  if (!report.ok()) throw InputError(report.entries);

  Structure probe(sig, decl.name, elements, {});
  std::vector<std::vector<ElemId>> actions(s.generator_count());
  for (SortId k = 0; k < s.sort_count(); ++k) {
    for (GenId g : s.generators_of(k)) actions[g].assign(elements[k].size(), 0);
    if (!carrier_of[k]) continue;
    std::map<std::string, bool> seen;
    ElemId index = 0;
    for (const auto& e : carrier_of[k]->elements) {
      if (seen.count(e.name)) continue;
      seen[e.name] = true;
      std::map<std::string, const std::string*> given;
      for (const auto& [label, value] : e.images) {
        if (!s.find_generator(k, label)) {
          report.add("element '" + e.name + "' of sort '" + s.sort_name(k) +
                         "' binds unknown generator '" + label + "'",
                     e.span);
        } else if (!given.emplace(label, &value).second) {
          report.add("element '" + e.name + "' binds generator '" + label + "' twice", e.span);
        }
      }
      for (GenId g : s.generators_of(k)) {
        const auto& gen = s.generator(g);
        auto it = given.find(gen.label);
        if (it == given.end()) {
          report.add("element '" + e.name + "' of sort '" + s.sort_name(k) +
                         "' is missing generator '" + gen.label + "'",
                     e.span);
          continue;
        }
        auto target = probe.find_element(gen.target, *it->second);
        if (!target) {
          report.add("element '" + e.name + "' maps '" + gen.label + "' to '" + *it->second +
                         "', which is not an element of sort '" + s.sort_name(gen.target) + "'",
                     e.span);
          continue;
        }
        actions[g][index] = *target;
      }
      ++index;
    }
  }
  if (!report.ok()) throw InputError(report.entries);
  return checked(std::move(sig), decl.name, std::move(elements), std::move(actions));
}

std::optional<ElemId> Structure::find_element(SortId k, const std::string& name) const {
  const auto& idx = index_.at(k);
  auto it = idx.find(name);
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

ElemId Structure::element(SortId k, const std::string& name) const {
  auto e = find_element(k, name);
  if (!e) {
    throw InputError("unknown element '" + name + "' of sort '" + sig_->sort_name(k) +
                     "' in structure '" + name_ + "'");
  }
  return *e;
}

ElemId Structure::act(const Path& p, ElemId e) const {
  for (GenId g : p.steps) e = actions_[g][e];
  return e;
}

ElemId Structure::act(const Arrow& a, ElemId e) const {
  return act(sig_->representative(a), e);
}

Boundary Structure::boundary(SortId k, ElemId e, std::size_t m) const {
  if (e >= size(k)) throw InputError("boundary: unknown element of sort '" + sig_->sort_name(k) + "'");
  Boundary out;
  for (const auto& entry : sig_->fanout(k, m)) out.push_back(act(entry.arrow, e));
  return out;
}

Boundary Structure::full_boundary(SortId k, ElemId e) const {
  if (e >= size(k)) throw InputError("boundary: unknown element of sort '" + sig_->sort_name(k) + "'");
  Boundary out;
  for (const auto& entry : sig_->full_fanout(k)) out.push_back(act(entry.arrow, e));
  return out;
}

Boundary Structure::generator_images(SortId k, ElemId e) const {
  Boundary out;
  for (GenId g : sig_->generators_of(k)) out.push_back(actions_[g][e]);
  return out;
}

std::vector<ElemId> Structure::fiber0(SortId k, const Boundary& beta) const {
  if (sig_->rank(k) == 0) {
    if (!beta.empty()) throw InputError("fiber0: rank-0 sort takes an empty boundary");
    std::vector<ElemId> all(size(k));
    for (ElemId e = 0; e < all.size(); ++e) all[e] = e;
    return all;
  }
  auto fan = sig_->fanout(k, 0);
  if (beta.size() != fan.size()) throw InputError("fiber0: boundary has the wrong length");
  for (std::size_t i = 0; i < fan.size(); ++i) {
    if (beta[i] >= size(fan[i].target)) throw InputError("fiber0: boundary value out of range");
  }
  std::vector<ElemId> out;
  for (ElemId e = 0; e < size(k); ++e) {
    bool ok = true;
    for (std::size_t i = 0; i < fan.size() && ok; ++i) ok = act(fan[i].arrow, e) == beta[i];
    if (ok) out.push_back(e);
  }
  return out;
}

std::vector<ElemId> Structure::full_fiber(SortId k, const Boundary& beta) const {
  auto fan = sig_->full_fanout(k);
  if (beta.size() != fan.size()) throw InputError("full_fiber: boundary has the wrong length");
  auto pos = position_in(fan, sig_->arrows_from(k).size());
  for (std::size_t i = 0; i < fan.size(); ++i) {
    if (beta[i] >= size(fan[i].target)) throw InputError("full_fiber: boundary value out of range");
  }
  for (std::size_t i = 0; i < fan.size(); ++i) {
    for (const auto& h : sig_->arrows_from(fan[i].target)) {
      auto j = pos[sig_->compose(fan[i].arrow, h).index];
      if (act(h, beta[i]) != beta[j]) {
        throw InputError("full_fiber: boundary for sort '" + sig_->sort_name(k) +
                         "' is incompatible along " + sig_->format_arrow(fan[i].arrow) + " then " +
                         sig_->format_arrow(h));
      }
    }
  }
  std::vector<ElemId> out;
  for (ElemId e = 0; e < size(k); ++e) {
    bool ok = true;
    for (std::size_t i = 0; i < fan.size() && ok; ++i) ok = act(fan[i].arrow, e) == beta[i];
    if (ok) out.push_back(e);
  }
  return out;
}

bool Structure::operator==(const Structure& other) const {
  if (!sig_ || !other.sig_) return sig_ == other.sig_;
  return (sig_ == other.sig_ || *sig_ == *other.sig_) && elements_ == other.elements_ &&
         actions_ == other.actions_;
}

StructureDecl Structure::decl() const {
  StructureDecl d{name_, sig_->name(), {}};
  for (SortId k = 0; k < sig_->sort_count(); ++k) {
    if (elements_[k].empty()) continue;
    CarrierDecl c{sig_->sort_name(k), {}, std::nullopt};
    for (ElemId e = 0; e < elements_[k].size(); ++e) {
      ElementDecl ed{elements_[k][e], {}, std::nullopt};
      for (GenId g : sig_->generators_of(k)) {
        const auto& gen = sig_->generator(g);
        ed.images.emplace_back(gen.label, elements_[gen.target][actions_[g][e]]);
      }
      c.elements.push_back(std::move(ed));
    }
    d.carriers.push_back(std::move(c));
  }
  return d;
}

ValidationReport validate_structure(const Structure& m) {
  ValidationReport report;
  const auto& s = m.signature();
  for (SortId k = 0; k < s.sort_count(); ++k) {
    std::map<std::string, int> seen;
    for (const auto& name : m.elements(k)) {
      if (seen[name]++ == 1) report.add("duplicate element '" + name + "' in sort '" + s.sort_name(k) + "'");
    }
  }
  bool typed = true;
  for (GenId g = 0; g < s.generator_count(); ++g) {
    const auto& gen = s.generator(g);
    const auto& act = m.action(g);
    if (act.size() != m.size(gen.source)) {
      report.add("action of '" + gen.label + "' on sort '" + s.sort_name(gen.source) +
                 "' has " + std::to_string(act.size()) + " entries for " +
                 std::to_string(m.size(gen.source)) + " elements");
      typed = false;
      continue;
    }
    for (ElemId e = 0; e < act.size(); ++e) {
      if (act[e] >= m.size(gen.target)) {
        report.add("element '" + m.element_name(gen.source, e) + "' of sort '" +
                   s.sort_name(gen.source) + "' maps '" + gen.label + "' outside sort '" +
                   s.sort_name(gen.target) + "'");
        typed = false;
      }
    }
  }
  if (!typed) return report;
  for (const auto& eq : s.equations()) {
    SortId k = eq.lhs.source;
    for (ElemId e = 0; e < m.size(k); ++e) {
      ElemId l = m.act(eq.lhs, e);
      ElemId r = m.act(eq.rhs, e);
      if (l != r) {
        SortId t = s.generator(eq.lhs.steps.back()).target;
        report.add("element '" + m.element_name(k, e) + "' of sort '" + s.sort_name(k) +
                   "' violates equation " + s.format_path(eq.lhs) + " = " +
                   s.format_path(eq.rhs) + ": '" + m.element_name(t, l) + "' vs '" +
                   m.element_name(t, r) + "'");
      }
    }
  }
  return report;
}

}  // namespace folds

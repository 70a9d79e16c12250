#include "foldskit/logic.hpp"

#include <map>
#include <sstream>

#include "foldskit/indiscernibility.hpp"

namespace folds {

using Kind = Formula::Kind;

FormulaPtr Formula::truth(bool value) {
  auto f = std::make_shared<Formula>();
  f->kind = value ? Kind::True : Kind::False;
  return f;
}

FormulaPtr Formula::negate(FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Not;
  f->args = {std::move(a)};
  return f;
}

FormulaPtr Formula::binary(Kind kind, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->args = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr Formula::quantifier(Kind kind, std::string var, std::string sort,
                               std::vector<Binding> bindings, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->var = std::move(var);
  f->sort = std::move(sort);
  f->bindings = std::move(bindings);
  f->args = {std::move(body)};
  return f;
}

FormulaPtr Formula::inhabited(std::string sort, std::vector<Binding> bindings) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Inhabited;
  f->sort = std::move(sort);
  f->bindings = std::move(bindings);
  return f;
}

FormulaPtr Formula::equal(std::string lhs, std::string rhs) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Equal;
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return f;
}

bool same_formula(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.var != b.var || a.sort != b.sort || a.bindings != b.bindings ||
      a.lhs != b.lhs || a.rhs != b.rhs || a.args.size() != b.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_formula(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

namespace {

class Elaborator {
 public:
  explicit Elaborator(const Signature& sig) : sig_(sig) {}

  ElaboratedFormula run(const FormulaPtr& f) {
    ElaboratedFormula out;
    out.source = f;
    out.root = node(*f);
    out.slot_names = names_;
    out.slot_sorts = sorts_;
    return out;
  }

 private:
  [[noreturn]] void fail(const Formula& f, const std::string& msg) const {
    throw InputError(msg, f.span);
  }

  std::size_t lookup(const Formula& f, const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (names_[*it] == name) return *it;
    }
    fail(f, "unbound variable '" + name + "'");
  }

  /// Resolves a sort with generator bindings and checks boundary agreement.
  /// Returns the per-generator slots and the symbolic boundary by arrow index.
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> bind(
      const Formula& f, SortId k, const std::vector<Binding>& bindings) const {
    const std::string& kname = sig_.sort_name(k);
    std::map<std::string, const Binding*> given;
    for (const auto& b : bindings) {
      if (!sig_.find_generator(k, b.label)) {
        fail(f, "sort '" + kname + "' has no generator '" + b.label + "'");
      }
      if (!given.emplace(b.label, &b).second) {
        fail(f, "generator '" + b.label + "' of sort '" + kname + "' is bound twice");
      }
    }
    std::vector<std::size_t> slots;
    for (GenId g : sig_.generators_of(k)) {
      const auto& gen = sig_.generator(g);
      auto it = given.find(gen.label);
      if (it == given.end()) {
        fail(f, "arity error: sort '" + kname + "' needs a value for generator '" + gen.label + "'");
      }
      std::size_t slot = lookup(f, it->second->var);
      if (sorts_[slot] != gen.target) {
        fail(f, "sort mismatch: generator '" + gen.label + "' of '" + kname + "' expects sort '" +
                    sig_.sort_name(gen.target) + "' but '" + it->second->var + "' has sort '" +
                    sig_.sort_name(sorts_[slot]) + "'");
      }
      slots.push_back(slot);
    }
    auto value = [&](const Path& p) {
      std::size_t u = slots[sig_.local_index(p.steps.front())];
      if (p.steps.size() == 1) return u;
      SortId at = sig_.generator(p.steps.front()).target;
      Path rest{at, {p.steps.begin() + 1, p.steps.end()}};
      return boundary_[u][sig_.classify(rest).index];
    };
    for (const auto& eq : sig_.equations()) {
      if (eq.lhs.source != k) continue;
      std::size_t l = value(eq.lhs);
      std::size_t r = value(eq.rhs);
      if (l != r) {
        fail(f, "boundary inconsistency in sort '" + kname + "': equation " +
                    sig_.format_path(eq.lhs) + " = " + sig_.format_path(eq.rhs) +
                    " requires '" + names_[l] + "' and '" + names_[r] + "' to coincide");
      }
    }
    std::vector<std::size_t> symbolic;
    for (const auto& a : sig_.arrows_from(k)) symbolic.push_back(value(sig_.representative(a)));
    return {slots, symbolic};
  }

  SortId resolve_sort(const Formula& f) const {
    auto k = sig_.find_sort(f.sort);
    if (!k) fail(f, "unknown sort '" + f.sort + "'");
    return *k;
  }

  std::shared_ptr<const Elaborated> node(const Formula& f) {
    auto e = std::make_shared<Elaborated>();
    e->kind = f.kind;
    switch (f.kind) {
      case Kind::True:
      case Kind::False:
        break;
      case Kind::Not:
      case Kind::And:
      case Kind::Or:
      case Kind::Implies:
      case Kind::Iff:
        for (const auto& a : f.args) e->args.push_back(node(*a));
        break;
      case Kind::Forall:
      case Kind::Exists: {
        e->sort = resolve_sort(f);
        auto [slots, symbolic] = bind(f, e->sort, f.bindings);
        e->generator_slots = slots;
        e->slot = names_.size();
        names_.push_back(f.var);
        sorts_.push_back(e->sort);
        boundary_.push_back(symbolic);
        scope_.push_back(e->slot);
        e->args.push_back(node(*f.args.at(0)));
        scope_.pop_back();
        break;
      }
      case Kind::Inhabited: {
        e->sort = resolve_sort(f);
        e->generator_slots = bind(f, e->sort, f.bindings).first;
        break;
      }
      case Kind::Equal: {
        e->lhs = lookup(f, f.lhs);
        e->rhs = lookup(f, f.rhs);
        if (sorts_[e->lhs] != sorts_[e->rhs]) {
          fail(f, "sort mismatch: '" + f.lhs + "' has sort '" + sig_.sort_name(sorts_[e->lhs]) +
                      "' but '" + f.rhs + "' has sort '" + sig_.sort_name(sorts_[e->rhs]) + "'");
        }
        if (boundary_[e->lhs] != boundary_[e->rhs]) {
          fail(f, "boundary mismatch: '" + f.lhs + "' and '" + f.rhs +
                      "' do not lie over the same boundary");
        }
        break;
      }
    }
    return e;
  }

  const Signature& sig_;
  std::vector<std::string> names_;
  std::vector<SortId> sorts_;
  std::vector<std::vector<std::size_t>> boundary_;
  std::vector<std::size_t> scope_;
};

class Evaluator {
 public:
  Evaluator(const Structure& m, const ElaboratedFormula& f) : m_(m), f_(f) {
    const auto& s = m.signature();
    index_.resize(s.sort_count());
    for (SortId k = 0; k < s.sort_count(); ++k) {
      for (ElemId e = 0; e < m.size(k); ++e) index_[k][m.generator_images(k, e)].push_back(e);
    }
    env_.assign(f.slot_names.size(), 0);
  }

  bool eval(const Elaborated& e) {
    switch (e.kind) {
      case Kind::True: return true;
      case Kind::False: return false;
      case Kind::Not: return !eval(*e.args[0]);
      case Kind::And: return eval(*e.args[0]) && eval(*e.args[1]);
      case Kind::Or: return eval(*e.args[0]) || eval(*e.args[1]);
      case Kind::Implies: return !eval(*e.args[0]) || eval(*e.args[1]);
      case Kind::Iff: return eval(*e.args[0]) == eval(*e.args[1]);
      case Kind::Forall:
        for (ElemId x : candidates(e)) {
          env_[e.slot] = x;
          if (!eval(*e.args[0])) return false;
        }
        return true;
      case Kind::Exists:
        for (ElemId x : candidates(e)) {
          env_[e.slot] = x;
          if (eval(*e.args[0])) return true;
        }
        return false;
      case Kind::Inhabited: return !candidates(e).empty();
      case Kind::Equal: return env_[e.lhs] == env_[e.rhs];
    }
    return false;
  }

  /// Peels universal quantifiers of a false formula, recording the witness.
  void counter(const Elaborated& e, std::vector<std::pair<std::string, std::string>>& out) {
    if (e.kind != Kind::Forall) return;
    for (ElemId x : candidates(e)) {
      env_[e.slot] = x;
      if (!eval(*e.args[0])) {
        out.emplace_back(f_.slot_names[e.slot], m_.element_name(e.sort, x));
        counter(*e.args[0], out);
        return;
      }
    }
  }

 private:
  const std::vector<ElemId>& candidates(const Elaborated& e) {
    static const std::vector<ElemId> kNone;
    Boundary key;
    for (std::size_t s : e.generator_slots) key.push_back(env_[s]);
    auto it = index_[e.sort].find(key);
    return it == index_[e.sort].end() ? kNone : it->second;
  }

  const Structure& m_;
  const ElaboratedFormula& f_;
  std::vector<std::map<Boundary, std::vector<ElemId>>> index_;
  std::vector<ElemId> env_;
};

void require_signature(const Structure& m, const Signature& sig) {
  if (!(m.signature() == sig)) {
    throw InputError("structure '" + m.name() + "' is not over signature '" + sig.name() + "'");
  }
}

}  // namespace

ElaboratedFormula elaborate(const Signature& sig, const FormulaPtr& f) {
  return Elaborator(sig).run(f);
}

bool eval(const Structure& m, const ElaboratedFormula& f) {
  Evaluator ev(m, f);
  return ev.eval(*f.root);
}

Theory Theory::make(std::string name, SignaturePtr sig,
                    std::vector<std::pair<std::string, FormulaPtr>> axioms) {
  Theory t{std::move(name), sig, {}};
  for (auto& [n, f] : axioms) {
    for (const auto& a : t.axioms) {
      if (a.name == n) throw InputError("duplicate axiom '" + n + "'", f->span);
    }
    t.axioms.push_back({n, f, elaborate(*sig, f), f->span});
  }
  return t;
}

TheoryReport check_theory(const Structure& m, const Theory& t) {
  require_signature(m, *t.sig);
  TheoryReport r;
  for (const auto& ax : t.axioms) {
    Evaluator ev(m, ax.elaborated);
    AxiomResult res{ax.name, ev.eval(*ax.elaborated.root), {}};
    if (!res.holds) ev.counter(*ax.elaborated.root, res.countermodel);
    r.results.push_back(std::move(res));
  }
  return r;
}

bool TheoryReport::all_hold() const {
  for (const auto& r : results) {
    if (!r.holds) return false;
  }
  return true;
}

std::string TheoryReport::to_string() const {
  std::ostringstream os;
  for (const auto& r : results) {
    os << r.name << ": " << (r.holds ? "true" : "false");
    if (!r.countermodel.empty()) {
      os << " (countermodel:";
      for (const auto& [v, e] : r.countermodel) os << " " << v << "=" << e;
      os << ")";
    }
    os << "\n";
  }
  return os.str();
}

InvarianceReport invariance_check(const Theory& t, const Structure& m, const Structure& n,
                                  const StructureMorphism& f, std::uint64_t budget) {
  require_signature(m, *t.sig);
  require_signature(n, *t.sig);
  InvarianceReport r;
  if (!is_univalent(m, budget).univalent || !is_univalent(n, budget).univalent) {
    r.applicable = false;
    r.note = "not applicable: both structures must be univalent";
    return r;
  }
  if (!is_sse(m, n, f, budget)) {
    r.applicable = false;
    r.note = "not applicable: the morphism is not a split surjective equivalence";
    return r;
  }
  auto rm = check_theory(m, t);
  auto rn = check_theory(n, t);
  for (std::size_t i = 0; i < rm.results.size(); ++i) {
    r.verdicts.emplace_back(rm.results[i].name, rm.results[i].holds, rn.results[i].holds);
  }
  r.note = r.agree() ? "axiom verdicts agree" : "IMPLEMENTATION BUG: axiom verdicts differ";
  return r;
}

bool InvarianceReport::agree() const {
  for (const auto& [name, a, b] : verdicts) {
    if (a != b) return false;
  }
  return true;
}

std::string InvarianceReport::to_string() const {
  std::ostringstream os;
  os << note << "\n";
  for (const auto& [name, a, b] : verdicts) {
    os << "  " << name << ": " << (a ? "true" : "false") << " / " << (b ? "true" : "false") << "\n";
  }
  return os.str();
}

}  // namespace folds

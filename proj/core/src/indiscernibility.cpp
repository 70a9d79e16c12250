#include "foldskit/indiscernibility.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace folds {

namespace {

using Group = std::pair<std::vector<ElemId>, std::vector<ElemId>>;

/// Backtracking over the jokered sorts of one context, rank by rank.
class Search {
 public:
  Search(const JokerContext& ctx, const Structure& p, const Structure& q, NodeBudget& budget,
         std::size_t limit)
      : ctx_(ctx), p_(p), q_(q), ds_(p.signature()), budget_(budget), limit_(limit) {
    maps_.resize(ds_.sort_count());
    for (SortId s : ctx_.order) maps_[s].assign(p_.size(s), 0);
  }

  std::size_t run(const std::function<void(const std::vector<std::vector<ElemId>>&)>& emit) {
    emit_ = &emit;
    for (SortId s : ctx_.ready_initially) {
      if (!feasible(s)) return 0;
    }
    solve(0);
    return found_;
  }

 private:
  ElemId image(SortId s, ElemId x) const { return ctx_.jokered[s] ? maps_[s][x] : x; }

  /// Elements of P and Q at s grouped by (mapped) generator images.
  bool groups(SortId s, std::vector<Group>* out) const {
    if (p_.size(s) != q_.size(s)) return false;
    auto gens = ds_.generators_of(s);
    std::map<Boundary, std::vector<ElemId>> gp;
    std::map<Boundary, std::vector<ElemId>> gq;
    Boundary key(gens.size());
    for (ElemId x = 0; x < p_.size(s); ++x) {
      for (std::size_t i = 0; i < gens.size(); ++i) {
        key[i] = image(ds_.generator(gens[i]).target, p_.act(gens[i], x));
      }
      gp[key].push_back(x);
    }
    for (ElemId y = 0; y < q_.size(s); ++y) {
      for (std::size_t i = 0; i < gens.size(); ++i) key[i] = q_.act(gens[i], y);
      gq[key].push_back(y);
    }
    if (gp.size() != gq.size()) return false;
    for (auto ip = gp.begin(), iq = gq.begin(); ip != gp.end(); ++ip, ++iq) {
      if (ip->first != iq->first || ip->second.size() != iq->second.size()) return false;
      if (out) out->emplace_back(std::move(ip->second), std::move(iq->second));
    }
    return true;
  }

  bool feasible(SortId s) const { return groups(s, nullptr); }

  void solve(std::size_t i) {
    if (found_ >= limit_) return;
    if (i == ctx_.order.size()) {
      ++found_;
      (*emit_)(maps_);
      return;
    }
    std::vector<Group> gs;
    if (!groups(ctx_.order[i], &gs)) return;
    assign(i, gs, 0);
  }

  void assign(std::size_t i, std::vector<Group>& gs, std::size_t gi) {
    if (gi == gs.size()) {
      for (SortId t : ctx_.ready_after[i]) {
        if (!feasible(t)) return;
      }
      solve(i + 1);
      return;
    }
    SortId s = ctx_.order[i];
    const auto& xs = gs[gi].first;
    auto ys = gs[gi].second;
    do {
      budget_.tick();
      for (std::size_t j = 0; j < xs.size(); ++j) maps_[s][xs[j]] = ys[j];
      assign(i, gs, gi + 1);
      if (found_ >= limit_) return;
    } while (std::next_permutation(ys.begin(), ys.end()));
  }

  const JokerContext& ctx_;
  const Structure& p_;
  const Structure& q_;
  const Signature& ds_;
  NodeBudget& budget_;
  std::size_t limit_;
  std::size_t found_ = 0;
  std::vector<std::vector<ElemId>> maps_;
  const std::function<void(const std::vector<std::vector<ElemId>>&)>* emit_ = nullptr;
};

std::vector<ElemId> iota_ids(std::size_t n) {
  std::vector<ElemId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

JokerContextPtr make_joker_context(const Structure& m, SortId k, std::uint64_t max_sorts) {
  const auto& s = m.signature();
  if (k >= s.sort_count() || s.rank(k) != 0) {
    throw InputError("indiscernibility: sort must have rank 0");
  }
  auto ctx = std::make_shared<JokerContext>();
  auto [fam, joker] = joker_extend(s, bottom_family(m), k);
  ctx->sort = k;
  ctx->joker = joker;
  ctx->dsig = derive_signature(m.signature_ptr(), fam, max_sorts);
  const auto& d = *ctx->dsig;
  const auto& ds = *d.sig;
  ctx->jokered.assign(ds.sort_count(), false);
  for (SortId t = 0; t < ds.sort_count(); ++t) {
    auto fan = s.fanout(d.parent[t], 0);
    for (std::size_t i = 0; i < fan.size(); ++i) {
      if (fan[i].target == k && d.alpha[t][i] == joker) ctx->jokered[t] = true;
    }
    if (ctx->jokered[t]) ctx->order.push_back(t);
  }
  std::stable_sort(ctx->order.begin(), ctx->order.end(),
                   [&](SortId x, SortId y) { return ds.rank(x) < ds.rank(y); });
  std::vector<std::size_t> position(ds.sort_count(), SIZE_MAX);
  for (std::size_t i = 0; i < ctx->order.size(); ++i) position[ctx->order[i]] = i;
  ctx->jokered_deps.resize(ds.sort_count());
  ctx->ready_after.resize(ctx->order.size());
  for (std::size_t i = 0; i < ctx->order.size(); ++i) {
    SortId t = ctx->order[i];
    std::size_t last = SIZE_MAX;
    for (GenId g : ds.generators_of(t)) {
      SortId target = ds.generator(g).target;
      if (!ctx->jokered[target]) continue;
      ctx->jokered_deps[t].push_back(target);
      last = last == SIZE_MAX ? position[target] : std::max(last, position[target]);
    }
    if (last == SIZE_MAX) {
      ctx->ready_initially.push_back(t);
    } else {
      ctx->ready_after[last].push_back(t);
    }
  }
  return ctx;
}

bool verify_indiscernibility(const Indiscernibility& phi) {
  const auto& p = *phi.from;
  const auto& q = *phi.to;
  const auto& ds = p.signature();
  if (phi.maps.size() != ds.sort_count()) return false;
  for (SortId s = 0; s < ds.sort_count(); ++s) {
    const auto& f = phi.maps[s];
    if (f.size() != p.size(s) || p.size(s) != q.size(s)) return false;
    std::vector<bool> hit(q.size(s), false);
    for (ElemId x = 0; x < f.size(); ++x) {
      if (f[x] >= hit.size() || hit[f[x]]) return false;
      hit[f[x]] = true;
      if (!phi.context->jokered[s] && f[x] != x) return false;
    }
  }
  for (GenId g = 0; g < ds.generator_count(); ++g) {
    const auto& gen = ds.generator(g);
    for (ElemId x = 0; x < p.size(gen.source); ++x) {
      if (q.act(g, phi.maps[gen.source][x]) != phi.maps[gen.target][p.act(g, x)]) return false;
    }
  }
  return true;
}

Indiscernibility compose(const Indiscernibility& phi, const Indiscernibility& psi) {
  if (phi.context != psi.context || phi.b != psi.a) {
    throw InputError("indiscernibilities do not compose");
  }
  Indiscernibility out = phi;
  out.b = psi.b;
  out.to = psi.to;
  for (std::size_t s = 0; s < out.maps.size(); ++s) {
    for (auto& v : out.maps[s]) v = psi.maps[s][v];
  }
  return out;
}

Indiscernibility inverse(const Indiscernibility& phi) {
  Indiscernibility out = phi;
  std::swap(out.a, out.b);
  std::swap(out.from, out.to);
  for (std::size_t s = 0; s < out.maps.size(); ++s) {
    for (ElemId x = 0; x < phi.maps[s].size(); ++x) out.maps[s][phi.maps[s][x]] = x;
  }
  return out;
}

IndiscernibilityEngine::IndiscernibilityEngine(std::shared_ptr<const Structure> m,
                                               std::uint64_t budget)
    : m_(std::move(m)), budget_(budget) {
  contexts_.resize(m_->signature().sort_count());
  partials_.resize(m_->signature().sort_count());
}

void IndiscernibilityEngine::check_rank0(SortId k, ElemId a, ElemId b) const {
  const auto& s = m_->signature();
  if (k >= s.sort_count()) throw InputError("indiscernibility: unknown sort");
  if (s.rank(k) != 0) {
    throw InputError("indiscernibility: sort '" + s.sort_name(k) +
                     "' has positive rank; use indiscernibilities_at");
  }
  if (a >= m_->size(k) || b >= m_->size(k)) {
    throw InputError("indiscernibility: unknown element of sort '" + s.sort_name(k) + "'");
  }
}

JokerContextPtr IndiscernibilityEngine::context(SortId k) {
  if (!contexts_.at(k)) contexts_[k] = make_joker_context(*m_, k, budget_);
  return contexts_[k];
}

std::shared_ptr<const Structure> IndiscernibilityEngine::partial(SortId k, ElemId a) {
  auto& cache = partials_.at(k);
  cache.resize(m_->size(k));
  if (!cache.at(a)) {
    auto ctx = context(k);
    cache[a] = std::make_shared<Structure>(partial_structure(*ctx->dsig, *m_, k, ctx->joker, a));
  }
  return cache[a];
}

std::size_t IndiscernibilityEngine::search(SortId k, ElemId a, ElemId b, std::size_t limit,
                                           std::vector<Indiscernibility>* out) {
  check_rank0(k, a, b);
  auto ctx = context(k);
  auto p = partial(k, a);
  auto q = partial(k, b);
  NodeBudget budget(budget_, "indiscernibility search");
  Search search(*ctx, *p, *q, budget, limit);
  const auto& ds = *ctx->dsig->sig;
  auto n = search.run([&](const std::vector<std::vector<ElemId>>& maps) {
    if (!out) return;
    Indiscernibility phi{k, a, b, ctx, p, q, {}};
    phi.maps.resize(ds.sort_count());
    for (SortId s = 0; s < ds.sort_count(); ++s) {
      phi.maps[s] = ctx->jokered[s] ? maps[s] : iota_ids(p->size(s));
    }
    out->push_back(std::move(phi));
  });
  last_nodes_ = budget.used();
  return n;
}

std::vector<Indiscernibility> IndiscernibilityEngine::list(SortId k, ElemId a, ElemId b,
                                                           std::size_t limit) {
  std::vector<Indiscernibility> out;
  search(k, a, b, limit, &out);
  return out;
}

std::size_t IndiscernibilityEngine::count(SortId k, ElemId a, ElemId b, std::size_t limit) {
  return search(k, a, b, limit, nullptr);
}

Indiscernibility IndiscernibilityEngine::identity(SortId k, ElemId a) {
  check_rank0(k, a, a);
  auto ctx = context(k);
  auto p = partial(k, a);
  Indiscernibility phi{k, a, a, ctx, p, p, {}};
  for (SortId s = 0; s < p->signature().sort_count(); ++s) phi.maps.push_back(iota_ids(p->size(s)));
  return phi;
}

std::vector<Indiscernibility> indiscernibilities(const Structure& m, SortId k, ElemId a, ElemId b,
                                                 std::uint64_t budget) {
  IndiscernibilityEngine engine(std::make_shared<Structure>(m), budget);
  return engine.list(k, a, b);
}

std::size_t count_indiscernibilities(const Structure& m, SortId k, ElemId a, ElemId b,
                                     std::size_t limit, std::uint64_t budget) {
  IndiscernibilityEngine engine(std::make_shared<Structure>(m), budget);
  return engine.count(k, a, b, limit);
}

Indiscernibility identity_indiscernibility(const Structure& m, SortId k, ElemId a) {
  IndiscernibilityEngine engine(std::make_shared<Structure>(m));
  return engine.identity(k, a);
}

LeveledIndiscernibilities indiscernibilities_at(const Structure& m, SortId k, ElemId a, ElemId b,
                                                std::uint64_t budget) {
  const auto& s = m.signature();
  if (k >= s.sort_count()) throw InputError("indiscernibilities_at: unknown sort");
  if (a >= m.size(k) || b >= m.size(k)) {
    throw InputError("indiscernibilities_at: unknown element of sort '" + s.sort_name(k) + "'");
  }
  if (m.full_boundary(k, a) != m.full_boundary(k, b)) {
    throw InputError("boundary mismatch: '" + m.element_name(k, a) + "' and '" +
                     m.element_name(k, b) + "' lie in different fibers of sort '" +
                     s.sort_name(k) + "'");
  }
  auto cur = std::make_shared<const Structure>(m);
  while (cur->signature().rank(k) > 0) {
    auto d = derive_structure(*cur, budget);
    auto [sa, ia] = d.placement[k][a];
    auto ib = d.placement[k][b].second;
    cur = d.structure;
    k = sa;
    a = ia;
    b = ib;
  }
  LeveledIndiscernibilities out{cur, k, a, b, {}};
  IndiscernibilityEngine engine(cur, budget);
  out.list = engine.list(k, a, b);
  return out;
}

namespace {

std::optional<UnivalenceFailure> first_failure_at(IndiscernibilityEngine& engine, SortId k,
                                                  std::size_t level) {
  const auto& m = engine.structure();
  for (ElemId a = 0; a < m.size(k); ++a) {
    for (ElemId b = a; b < m.size(k); ++b) {
      std::size_t c = engine.count(k, a, b, 2);
      if ((a == b && c != 1) || (a != b && c != 0)) {
        return UnivalenceFailure{level, m.signature().sort_name(k), m.element_name(k, a),
                                 m.element_name(k, b), c};
      }
    }
  }
  return std::nullopt;
}

}  // namespace

UnivalenceAt is_univalent_at(const Structure& m, SortId k, std::uint64_t budget) {
  IndiscernibilityEngine engine(std::make_shared<Structure>(m), budget);
  UnivalenceAt out;
  out.failure = first_failure_at(engine, k, 0);
  out.univalent = !out.failure;
  return out;
}

UnivalenceReport is_univalent(const Structure& m, std::uint64_t budget) {
  UnivalenceReport report;
  auto cur = std::make_shared<const Structure>(m);
  for (std::size_t level = 0;; ++level) {
    const auto& s = cur->signature();
    UnivalenceLevel lv{level, s.name(), true, std::nullopt};
    IndiscernibilityEngine engine(cur, budget);
    for (SortId k : s.sorts_of_rank(0)) {
      auto failure = first_failure_at(engine, k, level);
      if (level == 0) report.per_sort.emplace_back(s.sort_name(k), !failure);
      if (failure && lv.ok) {
        lv.ok = false;
        lv.failure = failure;
        if (level > 0) break;
      }
    }
    report.univalent = report.univalent && lv.ok;
    report.levels.push_back(std::move(lv));
    if (s.height() <= 1) break;
    cur = derive_structure(*cur, budget).structure;
  }
  return report;
}

std::string UnivalenceReport::to_string() const {
  std::ostringstream os;
  os << "univalent: " << (univalent ? "true" : "false") << "\n";
  for (const auto& lv : levels) {
    os << "  level " << lv.level << ": " << (lv.ok ? "ok" : "fails");
    if (lv.failure) {
      const auto& f = *lv.failure;
      os << " at sort " << f.sort << ", pair (" << f.a << "," << f.b << ") with " << f.count
         << (f.count >= 2 ? "+" : "") << (f.count == 1 ? " indiscernibility" : " indiscernibilities");
    }
    os << "\n";
  }
  return os.str();
}

std::vector<FiberViolation> top_fiber_violations(const Structure& m) {
  const auto& s = m.signature();
  std::vector<FiberViolation> out;
  if (s.sort_count() == 0) return out;
  std::size_t top = s.height() - 1;
  for (SortId k : s.sorts_of_rank(top)) {
    std::map<Boundary, std::vector<ElemId>> fibers;
    for (ElemId e = 0; e < m.size(k); ++e) fibers[m.full_boundary(k, e)].push_back(e);
    for (const auto& [beta, es] : fibers) {
      if (es.size() <= 1) continue;
      FiberViolation v{s.sort_name(k), {}};
      for (ElemId e : es) v.elements.push_back(m.element_name(k, e));
      out.push_back(std::move(v));
    }
  }
  return out;
}

TruncationReport truncation_report(const Structure& m, std::uint64_t budget) {
  TruncationReport r;
  if (!is_univalent(m, budget).univalent) {
    r.applicable = false;
    return r;
  }
  r.violations = top_fiber_violations(m);
  r.ok = r.violations.empty();
  return r;
}

std::string TruncationReport::to_string() const {
  if (!applicable) return "not applicable: structure is not univalent\n";
  std::ostringstream os;
  os << "top-rank fibers are propositions: " << (ok ? "true" : "false") << "\n";
  for (const auto& v : violations) {
    os << "  sort " << v.sort << " fiber {";
    for (std::size_t i = 0; i < v.elements.size(); ++i) os << (i ? "," : "") << v.elements[i];
    os << "}\n";
  }
  return os.str();
}

}  // namespace folds

#include "foldskit/signature.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace folds {

namespace {

constexpr std::size_t kMaxPathsPerSort = 1'000'000;

struct ResolvedPath {
  Path path;
  std::string target;
};

/// Walks `labels` (outside-in) starting from `source`.
std::optional<ResolvedPath> resolve_labels(const SignatureDecl& decl,
                                           const std::map<std::string, std::size_t>& index,
                                           const std::string& source,
                                           const std::vector<std::string>& labels) {
  if (labels.empty()) return std::nullopt;
  auto it = index.find(source);
  if (it == index.end()) return std::nullopt;
  ResolvedPath out;
  std::string current = source;
  for (auto label = labels.rbegin(); label != labels.rend(); ++label) {
    auto cur = index.find(current);
    if (cur == index.end()) return std::nullopt;
    const auto& gens = decl.sorts[cur->second].generators;
    auto g = std::find_if(gens.begin(), gens.end(),
                          [&](const GeneratorDecl& gd) { return gd.label == *label; });
    if (g == gens.end()) return std::nullopt;
    // Step ids are filled in later by Signature::from_decl; here only typing matters.
    out.path.steps.push_back(static_cast<GenId>(g - gens.begin()));
    current = g->target;
  }
  out.target = current;
  return out;
}

std::string written(const std::vector<std::string>& labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) s += '.';
    s += labels[i];
  }
  return s;
}

/// Determines the source sort of an equation, reporting problems.
std::optional<std::string> equation_source(const SignatureDecl& decl,
                                           const std::map<std::string, std::size_t>& index,
                                           const PathEquation& eq, ValidationReport& report) {
  const std::string shown = written(eq.lhs) + " = " + written(eq.rhs);
  if (eq.lhs.empty() || eq.rhs.empty()) {
    report.add("equation '" + shown + "' has an empty side", eq.span);
    return std::nullopt;
  }
  auto check_from = [&](const std::string& src, bool loud) -> bool {
    auto l = resolve_labels(decl, index, src, eq.lhs);
    auto r = resolve_labels(decl, index, src, eq.rhs);
    if (!l || !r) {
      if (loud) {
        report.add("equation '" + shown + "' is not composable from source sort '" + src + "'",
                   eq.span);
      }
      return false;
    }
    if (l->target != r->target) {
      if (loud) {
        report.add("equation '" + shown + "' has mismatched endpoints: '" + written(eq.lhs) +
                       "' ends at '" + l->target + "' but '" + written(eq.rhs) + "' ends at '" +
                       r->target + "'",
                   eq.span);
      }
      return false;
    }
    return true;
  };

  if (!eq.source.empty()) {
    if (!index.count(eq.source)) {
      report.add("equation '" + shown + "' names unknown source sort '" + eq.source + "'",
                 eq.span);
      return std::nullopt;
    }
    if (!check_from(eq.source, true)) return std::nullopt;
    return eq.source;
  }

  std::vector<std::string> candidates;
  std::vector<std::string> partial;
  for (const auto& s : decl.sorts) {
    bool has_l = std::any_of(s.generators.begin(), s.generators.end(),
                             [&](const GeneratorDecl& g) { return g.label == eq.lhs.back(); });
    bool has_r = std::any_of(s.generators.begin(), s.generators.end(),
                             [&](const GeneratorDecl& g) { return g.label == eq.rhs.back(); });
    if (!has_l && !has_r) continue;
    if (check_from(s.id, false)) {
      candidates.push_back(s.id);
    } else {
      partial.push_back(s.id);
    }
  }
  if (candidates.size() == 1) return candidates.front();
  if (candidates.size() > 1) {
    std::string names;
    for (const auto& c : candidates) names += (names.empty() ? "" : ", ") + c;
    report.add("equation '" + shown + "' is ambiguous between source sorts " + names +
                   "; qualify it as 'eq SORT: ...'",
               eq.span);
    return std::nullopt;
  }
  if (partial.size() == 1) {
    check_from(partial.front(), true);
  } else {
    report.add("equation '" + shown + "': the two sides do not share a source sort", eq.span);
  }
  return std::nullopt;
}

}  // namespace

ValidationReport validate_signature(const SignatureDecl& decl) {
  ValidationReport report;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < decl.sorts.size(); ++i) {
    const auto& s = decl.sorts[i];
    if (s.id.empty()) report.add("sort with empty id", s.span);
    if (!index.emplace(s.id, i).second) report.add("duplicate sort '" + s.id + "'", s.span);
  }
  std::size_t max_rank = 0;
  for (const auto& s : decl.sorts) {
    max_rank = std::max(max_rank, s.rank);
    std::set<std::string> labels;
    for (const auto& g : s.generators) {
      if (!labels.insert(g.label).second) {
        report.add("duplicate generator label '" + g.label + "' in sort '" + s.id + "'", g.span);
      }
      auto t = index.find(g.target);
      if (t == index.end()) {
        report.add("generator '" + g.label + "' of sort '" + s.id + "' targets unknown sort '" +
                       g.target + "'",
                   g.span);
        continue;
      }
      const auto& target = decl.sorts[t->second];
      if (target.rank >= s.rank) {
        report.add("rank violation: generator '" + g.label + "' goes from '" + s.id + "' (rank " +
                       std::to_string(s.rank) + ") to '" + target.id + "' (rank " +
                       std::to_string(target.rank) + "); ranks must strictly decrease",
                   g.span);
      }
    }
  }
  if (!report.ok()) {
    // Equations cannot be typed against a broken sort table.
    return report;
  }
  for (const auto& eq : decl.equations) equation_source(decl, index, eq, report);
  if (decl.height) {
    std::size_t needed = decl.sorts.empty() ? 0 : max_rank + 1;
    if (*decl.height < needed) {
      report.add("declared height " + std::to_string(*decl.height) + " is below 1 + max rank (" +
                 std::to_string(needed) + ")");
    }
  }
  return report;
}

Signature Signature::from_decl(const SignatureDecl& decl) {
  ValidationReport report = validate_signature(decl);
  if (!report.ok()) throw InputError(report.entries);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < decl.sorts.size(); ++i) index.emplace(decl.sorts[i].id, i);

  std::vector<SortSpec> sorts;
  std::vector<GenId> first_gen;
  GenId next = 0;
  for (const auto& s : decl.sorts) {
    SortSpec spec{s.id, s.rank, {}};
    first_gen.push_back(next);
    for (const auto& g : s.generators) {
      spec.generators.emplace_back(g.label, static_cast<SortId>(index.at(g.target)));
      ++next;
    }
    sorts.push_back(std::move(spec));
  }

  auto to_path = [&](const std::string& src, const std::vector<std::string>& labels) {
    Path p;
    p.source = static_cast<SortId>(index.at(src));
    std::size_t current = index.at(src);
    for (auto label = labels.rbegin(); label != labels.rend(); ++label) {
      const auto& gens = decl.sorts[current].generators;
      auto g = std::find_if(gens.begin(), gens.end(),
                            [&](const GeneratorDecl& gd) { return gd.label == *label; });
      p.steps.push_back(first_gen[current] + static_cast<GenId>(g - gens.begin()));
      current = index.at(g->target);
    }
    return p;
  };

  std::vector<Equation> equations;
  for (const auto& eq : decl.equations) {
    ValidationReport scratch;
    auto src = equation_source(decl, index, eq, scratch);
    equations.push_back({to_path(*src, eq.lhs), to_path(*src, eq.rhs)});
  }
  return Signature(decl.name, std::move(sorts), std::move(equations), decl.height);
}

Signature::Signature(std::string name, std::vector<SortSpec> sorts,
                     std::vector<Equation> equations, std::optional<std::size_t> height)
    : name_(std::move(name)),
      sorts_(std::move(sorts)),
      equations_(std::move(equations)),
      declared_height_(height) {
  std::vector<Diagnostic> problems;
  std::size_t max_rank = 0;
  sort_generators_.resize(sorts_.size());
  for (SortId k = 0; k < sorts_.size(); ++k) {
    const auto& s = sorts_[k];
    max_rank = std::max(max_rank, s.rank);
    if (!sort_index_.emplace(s.id, k).second) {
      problems.push_back({"duplicate sort '" + s.id + "'", std::nullopt});
    }
    std::set<std::string> labels;
    for (std::size_t i = 0; i < s.generators.size(); ++i) {
      const auto& [label, target] = s.generators[i];
      if (target >= sorts_.size()) {
        problems.push_back({"generator '" + label + "' of '" + s.id + "' has no target", {}});
        continue;
      }
      if (sorts_[target].rank >= s.rank) {
        problems.push_back({"rank violation: generator '" + label + "' of '" + s.id +
                                "' does not lower rank",
                            std::nullopt});
      }
      if (!labels.insert(label).second) {
        problems.push_back({"duplicate generator label '" + label + "' in '" + s.id + "'", {}});
      }
      sort_generators_[k].push_back(static_cast<GenId>(generators_.size()));
      local_index_.push_back(i);
      generators_.push_back({label, k, target});
    }
  }
  height_ = sorts_.empty() ? 0 : max_rank + 1;
  if (declared_height_) {
    if (*declared_height_ < height_) {
      problems.push_back({"declared height below 1 + max rank", std::nullopt});
    }
    height_ = std::max(height_, *declared_height_);
  }
  if (!problems.empty()) throw InputError(problems);

  auto check_path = [&](const Path& p) -> std::optional<SortId> {
    if (p.steps.empty() || p.source >= sorts_.size()) return std::nullopt;
    SortId cur = p.source;
    for (GenId g : p.steps) {
      if (g >= generators_.size() || generators_[g].source != cur) return std::nullopt;
      cur = generators_[g].target;
    }
    return cur;
  };
  for (const auto& eq : equations_) {
    auto l = check_path(eq.lhs);
    auto r = check_path(eq.rhs);
    if (!l || !r || eq.lhs.source != eq.rhs.source || *l != *r) {
      problems.push_back({"ill-typed equation " + format_path(eq.lhs) + " = " +
                              format_path(eq.rhs),
                          std::nullopt});
    }
  }
  if (!problems.empty()) throw InputError(problems);
  build_classes();
}

void Signature::build_classes() {
  out_.assign(sorts_.size(), {});
  for (SortId k = 0; k < sorts_.size(); ++k) {
    // Every path out of K; finite because ranks strictly decrease.
    std::vector<std::vector<GenId>> paths;
    std::map<std::vector<GenId>, std::size_t> where;
    std::vector<std::pair<std::vector<GenId>, SortId>> stack;
    for (GenId g : sort_generators_[k]) stack.push_back({{g}, generators_[g].target});
    while (!stack.empty()) {
      auto [steps, at] = std::move(stack.back());
      stack.pop_back();
      for (GenId g : sort_generators_[at]) {
        auto longer = steps;
        longer.push_back(g);
        stack.push_back({std::move(longer), generators_[g].target});
      }
      where.emplace(steps, paths.size());
      paths.push_back(std::move(steps));
      if (paths.size() > kMaxPathsPerSort) {
        throw InputError("sort '" + sorts_[k].id + "' has too many dependency paths");
      }
    }

    std::vector<std::size_t> parent(paths.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
      a = find(a);
      b = find(b);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };

    // One rewrite step anywhere inside a path; the generated equivalence is
    // the congruence closure, since whiskering is built into the rewrite.
    auto rewrite = [&](std::size_t pi, const Path& from, const Path& to) {
      const auto& p = paths[pi];
      const auto& pat = from.steps;
      if (pat.size() > p.size()) return;
      for (std::size_t i = 0; i + pat.size() <= p.size(); ++i) {
        if (!std::equal(pat.begin(), pat.end(), p.begin() + static_cast<std::ptrdiff_t>(i))) {
          continue;
        }
        std::vector<GenId> q(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(i));
        q.insert(q.end(), to.steps.begin(), to.steps.end());
        q.insert(q.end(), p.begin() + static_cast<std::ptrdiff_t>(i + pat.size()), p.end());
        auto it = where.find(q);
        if (it != where.end()) unite(pi, it->second);
      }
    };
    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
      for (const auto& eq : equations_) {
        rewrite(pi, eq.lhs, eq.rhs);
        rewrite(pi, eq.rhs, eq.lhs);
      }
    }

    std::map<std::size_t, std::vector<GenId>> best;
    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
      auto root = find(pi);
      auto it = best.find(root);
      if (it == best.end() || paths[pi] < it->second) best[root] = paths[pi];
    }
    std::vector<std::pair<SortId, std::vector<GenId>>> classes;
    for (const auto& [root, rep] : best) classes.push_back({generators_[rep.back()].target, rep});
    std::sort(classes.begin(), classes.end());

    auto& oc = out_[k];
    std::map<std::vector<GenId>, std::uint32_t> rep_index;
    for (std::uint32_t c = 0; c < classes.size(); ++c) {
      rep_index[classes[c].second] = c;
      oc.reps.push_back(Path{k, classes[c].second});
      oc.arrows.push_back(Arrow{k, classes[c].first, c});
    }
    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
      oc.path_class[paths[pi]] = rep_index.at(best.at(find(pi)));
    }
  }
}

std::optional<GenId> Signature::find_generator(SortId k, const std::string& label) const {
  for (GenId g : sort_generators_.at(k)) {
    if (generators_[g].label == label) return g;
  }
  return std::nullopt;
}

std::optional<SortId> Signature::find_sort(const std::string& id) const {
  auto it = sort_index_.find(id);
  if (it == sort_index_.end()) return std::nullopt;
  return it->second;
}

SortId Signature::sort(const std::string& id) const {
  auto k = find_sort(id);
  if (!k) throw InputError("unknown sort '" + id + "' in signature '" + name_ + "'");
  return *k;
}

std::vector<SortId> Signature::sorts_of_rank(std::size_t r) const {
  std::vector<SortId> out;
  for (SortId k = 0; k < sorts_.size(); ++k) {
    if (sorts_[k].rank == r) out.push_back(k);
  }
  return out;
}

std::vector<Arrow> Signature::hom_set(SortId k, SortId l) const {
  if (k >= sorts_.size() || l >= sorts_.size()) throw InputError("hom_set: undefined sort");
  std::vector<Arrow> out;
  for (const auto& a : out_[k].arrows) {
    if (a.target == l) out.push_back(a);
  }
  return out;
}

Arrow Signature::compose(const Arrow& f, const Arrow& g) const {
  if (f.target != g.source) {
    throw InputError("compose: endpoint mismatch, " + format_arrow(f) + " ends at '" +
                     sort_name(f.target) + "' but " + format_arrow(g) + " starts at '" +
                     sort_name(g.source) + "'");
  }
  Path p = representative(f);
  const auto& tail = representative(g).steps;
  p.steps.insert(p.steps.end(), tail.begin(), tail.end());
  return classify(p);
}

Arrow Signature::classify(const Path& p) const {
  if (p.source >= out_.size()) throw InputError("classify: undefined sort");
  const auto& oc = out_[p.source];
  auto it = oc.path_class.find(p.steps);
  if (it == oc.path_class.end()) throw InputError("classify: not a composable path");
  return oc.arrows[it->second];
}

Arrow Signature::generator_arrow(GenId g) const {
  return classify(Path{generators_.at(g).source, {g}});
}

const Path& Signature::representative(const Arrow& a) const {
  return out_.at(a.source).reps.at(a.index);
}

std::vector<FanoutEntry> Signature::fanout(SortId k, std::size_t m) const {
  if (k >= sorts_.size()) throw InputError("fanout: undefined sort");
  if (m >= sorts_[k].rank) {
    throw InputError("fanout: rank " + std::to_string(m) + " out of range for sort '" +
                     sorts_[k].id + "' of rank " + std::to_string(sorts_[k].rank));
  }
  std::vector<FanoutEntry> out;
  for (const auto& a : out_[k].arrows) {
    if (sorts_[a.target].rank == m) out.push_back({a.target, a});
  }
  return out;
}

std::vector<FanoutEntry> Signature::full_fanout(SortId k) const {
  std::vector<FanoutEntry> out;
  for (std::size_t m = 0; m < rank(k); ++m) {
    auto level = fanout(k, m);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::string Signature::format_path(const Path& p) const {
  std::string s;
  for (auto it = p.steps.rbegin(); it != p.steps.rend(); ++it) {
    if (!s.empty()) s += '.';
    s += *it < generators_.size() ? generators_[*it].label : "?";
  }
  return s;
}

SignatureDecl Signature::decl() const {
  SignatureDecl d;
  d.name = name_;
  std::size_t natural = 0;
  for (const auto& s : sorts_) {
    SortDecl sd{s.id, s.rank, {}, std::nullopt};
    for (const auto& [label, target] : s.generators) {
      sd.generators.push_back({label, sorts_[target].id, std::nullopt});
    }
    natural = std::max(natural, s.rank + 1);
    d.sorts.push_back(std::move(sd));
  }
  auto labels = [&](const Path& p) {
    std::vector<std::string> out;
    for (auto it = p.steps.rbegin(); it != p.steps.rend(); ++it) out.push_back(generators_[*it].label);
    return out;
  };
  for (const auto& eq : equations_) {
    d.equations.push_back({sorts_[eq.lhs.source].id, labels(eq.lhs), labels(eq.rhs), std::nullopt});
  }
  if (height_ != natural) d.height = height_;
  return d;
}

bool Signature::operator==(const Signature& other) const {
  return name_ == other.name_ && height_ == other.height_ && sorts_ == other.sorts_ &&
         equations_ == other.equations_;
}

}  // namespace folds

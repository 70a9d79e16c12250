#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "foldskit/derivation.hpp"

namespace folds {

/// The joker-extended derivative Λ/(M₀+[K]) shared by every pair a, b at K.
struct JokerContext {
  SortId sort = 0;
  ElemId joker = 0;
  DerivedSignaturePtr dsig;
  /// Per derived sort: whether its boundary mentions the joker.
  std::vector<bool> jokered;
  /// Jokered sorts, rank ascending.
  std::vector<SortId> order;
  /// Per derived sort: its generators' targets that are jokered.
  std::vector<std::vector<SortId>> jokered_deps;
  /// For each position in `order`, the later sorts whose last jokered
  /// dependency sits at that position; these are checked right after it.
  std::vector<std::vector<SortId>> ready_after;
  /// Sorts with no jokered dependency (checked before the search starts).
  std::vector<SortId> ready_initially;
};
using JokerContextPtr = std::shared_ptr<const JokerContext>;

JokerContextPtr make_joker_context(const Structure& m, SortId k,
                                   std::uint64_t max_sorts = kDefaultBudget);

/// An indiscernibility a ⋍ b: one bijection per derived sort from the
/// carrier of ∂ₐM to that of ∂_bM (identities on joker-free sorts).
struct Indiscernibility {
  SortId sort = 0;
  ElemId a = 0;
  ElemId b = 0;
  JokerContextPtr context;
  std::shared_ptr<const Structure> from;
  std::shared_ptr<const Structure> to;
  std::vector<std::vector<ElemId>> maps;

  ElemId apply(SortId derived_sort, ElemId x) const { return maps.at(derived_sort).at(x); }
};

/// Bijective on every sort, natural along every generator, identity off the joker.
bool verify_indiscernibility(const Indiscernibility& phi);
/// Fiberwise composite of a ⋍ b and b ⋍ c; throws when they do not meet.
Indiscernibility compose(const Indiscernibility& phi, const Indiscernibility& psi);
/// Fiberwise inverse b ⋍ a.
Indiscernibility inverse(const Indiscernibility& phi);

/// Runs indiscernibility searches on one structure, caching the joker
/// contexts per sort and the partial structures per element.
class IndiscernibilityEngine {
 public:
  explicit IndiscernibilityEngine(std::shared_ptr<const Structure> m,
                                  std::uint64_t budget = kDefaultBudget);

  const Structure& structure() const { return *m_; }

  /// Every indiscernibility a ⋍ b at rank-0 sort K, up to `limit`, in a
  /// deterministic order; for a = b the identity comes first.
  std::vector<Indiscernibility> list(SortId k, ElemId a, ElemId b,
                                     std::size_t limit = std::numeric_limits<std::size_t>::max());
  /// Number of indiscernibilities, stopping early at `limit`.
  std::size_t count(SortId k, ElemId a, ElemId b,
                    std::size_t limit = std::numeric_limits<std::size_t>::max());
  /// The all-identity indiscernibility a ⋍ a.
  Indiscernibility identity(SortId k, ElemId a);

  JokerContextPtr context(SortId k);
  std::shared_ptr<const Structure> partial(SortId k, ElemId a);
  /// Search nodes used by the last call.
  std::uint64_t last_nodes() const { return last_nodes_; }

 private:
  std::size_t search(SortId k, ElemId a, ElemId b, std::size_t limit,
                     std::vector<Indiscernibility>* out);
  void check_rank0(SortId k, ElemId a, ElemId b) const;

  std::shared_ptr<const Structure> m_;
  std::uint64_t budget_;
  std::uint64_t last_nodes_ = 0;
  std::vector<JokerContextPtr> contexts_;
  std::vector<std::vector<std::shared_ptr<const Structure>>> partials_;
};

std::vector<Indiscernibility> indiscernibilities(const Structure& m, SortId k, ElemId a, ElemId b,
                                                 std::uint64_t budget = kDefaultBudget);
std::size_t count_indiscernibilities(const Structure& m, SortId k, ElemId a, ElemId b,
                                     std::size_t limit = std::numeric_limits<std::size_t>::max(),
                                     std::uint64_t budget = kDefaultBudget);
Indiscernibility identity_indiscernibility(const Structure& m, SortId k, ElemId a);

/// Indiscernibilities between elements of a sort of any rank, computed as
/// rank-0 elements of the iterated derivative at their shared boundary.
struct LeveledIndiscernibilities {
  std::shared_ptr<const Structure> level;  ///< the rank(K)-fold derived structure
  SortId sort = 0;                         ///< where a and b live in `level`
  ElemId a = 0;
  ElemId b = 0;
  std::vector<Indiscernibility> list;
};
/// Throws InputError when a and b have different boundaries.
LeveledIndiscernibilities indiscernibilities_at(const Structure& m, SortId k, ElemId a, ElemId b,
                                                std::uint64_t budget = kDefaultBudget);

struct UnivalenceFailure {
  std::size_t level = 0;
  std::string sort;
  std::string a;
  std::string b;
  std::size_t count = 0;  ///< indiscernibilities found (capped at 2)
};

struct UnivalenceAt {
  bool univalent = true;
  std::optional<UnivalenceFailure> failure;
};
UnivalenceAt is_univalent_at(const Structure& m, SortId k, std::uint64_t budget = kDefaultBudget);

struct UnivalenceLevel {
  std::size_t level = 0;
  std::string signature;
  bool ok = true;
  std::optional<UnivalenceFailure> failure;
};
struct UnivalenceReport {
  bool univalent = true;
  std::vector<UnivalenceLevel> levels;
  /// Per rank-0 sort of the original structure: univalent there or not.
  std::vector<std::pair<std::string, bool>> per_sort;

  std::string to_string() const;
};
/// Univalence at every rank-0 sort, then recursively for the derived structure.
UnivalenceReport is_univalent(const Structure& m, std::uint64_t budget = kDefaultBudget);

struct FiberViolation {
  std::string sort;
  std::vector<std::string> elements;
};
struct TruncationReport {
  bool applicable = true;
  bool ok = true;
  std::vector<FiberViolation> violations;

  std::string to_string() const;
};
/// Top-rank fibers with more than one element, regardless of univalence.
std::vector<FiberViolation> top_fiber_violations(const Structure& m);
/// For univalent M, every top-rank fiber has at most one element; otherwise
/// the report is marked not applicable.
TruncationReport truncation_report(const Structure& m, std::uint64_t budget = kDefaultBudget);

}  // namespace folds

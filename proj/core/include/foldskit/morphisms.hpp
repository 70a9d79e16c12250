#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "foldskit/derivation.hpp"

namespace folds {

/// Per-sort element maps from one structure to another.
struct StructureMorphism {
  std::vector<std::vector<ElemId>> maps;

  bool operator==(const StructureMorphism&) const = default;
};

/// Typing and naturality along every generator.
ValidationReport validate_morphism(const Structure& m, const Structure& n,
                                   const StructureMorphism& f);
/// For f: M → α*N given as maps M(K) → N(αK).
ValidationReport validate_morphism(const SigMorphism& alpha, const Structure& m,
                                   const Structure& n, const StructureMorphism& f);

StructureMorphism identity_morphism(const Structure& m);
/// `f` followed by `g`.
StructureMorphism compose(const StructureMorphism& f, const StructureMorphism& g);

/// Every morphism M → N in a deterministic order (sorts by rank, then
/// elements). Throws BudgetExhausted past the node budget.
std::vector<StructureMorphism> enumerate_morphisms(
    const Structure& m, const Structure& n, std::uint64_t budget = kDefaultBudget,
    std::size_t limit = std::numeric_limits<std::size_t>::max());

bool is_iso(const Structure& m, const Structure& n, const StructureMorphism& f);
/// The two-sided inverse when f is an isomorphism.
std::optional<StructureMorphism> inverse_morphism(const Structure& m, const Structure& n,
                                                  const StructureMorphism& f);

/// Surjective on the bottom and, recursively, on every fiber over every
/// boundary of the derived structures. Over finite sets split surjections
/// and surjections coincide, so one check serves both.
bool is_sse(const Structure& m, const Structure& n, const StructureMorphism& f,
            std::uint64_t budget = kDefaultBudget);
/// Surjective up to indiscernibility in the codomain, level by level.
bool is_equivalence(const Structure& m, const Structure& n, const StructureMorphism& f,
                    std::uint64_t budget = kDefaultBudget);
/// Relative form for f: M → α*N with α a discrete opfibration.
bool is_equivalence_rel(const SigMorphism& alpha, const Structure& m, const Structure& n,
                        const StructureMorphism& f, std::uint64_t budget = kDefaultBudget);

struct HsipReport {
  bool applicable = true;
  std::string note;
  std::size_t morphisms = 0;
  std::size_t sse = 0;
  std::size_t isos = 0;
  std::size_t equivalences = 0;
  bool codomain_univalent = false;
  std::vector<std::string> counterexamples;

  bool ok() const { return counterexamples.empty(); }
  std::string to_string() const;
};

/// Checks, over all morphisms M → N, that for univalent M every split
/// surjective equivalence is a levelwise bijection and an equivalence, and
/// that every equivalence is split surjective when N is univalent too.
HsipReport hsip_check(const Structure& m, const Structure& n,
                      std::uint64_t budget = kDefaultBudget);

std::string format_morphism(const Structure& m, const Structure& n, const StructureMorphism& f);

}  // namespace folds

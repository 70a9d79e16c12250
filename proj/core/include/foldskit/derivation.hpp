#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "foldskit/structure.hpp"

namespace folds {

/// Element names per rank-0 sort of a signature. Entries for sorts of
/// positive rank are ignored and kept empty.
struct BottomFamily {
  std::vector<std::vector<std::string>> members;

  bool operator==(const BottomFamily&) const = default;
};

/// The rank-0 carriers of a structure.
BottomFamily bottom_family(const Structure& m);
/// Parses "O={a,b};X={}" against `sig`. Rank-0 sorts left out are empty.
BottomFamily parse_family(const Signature& sig, const std::string& text);

/// Name of the joker element adjoined by joker_extend.
inline const std::string kJoker = "★";

/// Adds a fresh element to the family at rank-0 sort K and returns its index.
std::pair<BottomFamily, ElemId> joker_extend(const Signature& sig, BottomFamily fam, SortId k);

/// The derivative of a signature with respect to a family, with the
/// bookkeeping that ties each derived sort back to its parent.
struct DerivedSignature {
  SignaturePtr base;
  BottomFamily family;
  SignaturePtr sig;
  /// Per derived sort: the parent sort of `base` and the boundary values,
  /// aligned with base->fanout(parent, 0) and indexing `family`.
  std::vector<SortId> parent;
  std::vector<Boundary> alpha;
  /// Per derived generator: the generator of `base` it lifts.
  std::vector<GenId> lifted_from;
  std::map<std::pair<SortId, Boundary>, SortId> index;

  /// Throws InputError when (parent, alpha) is not a derived sort.
  SortId find(SortId parent, const Boundary& alpha) const;
  /// Lifts a path of `base` starting at derived sort `from`; every step must
  /// end at a sort of positive rank.
  Path lift(SortId from, const Path& p) const;
  /// Boundary of the target of base generator g, given the boundary at its source.
  Boundary transport(SortId parent, const Boundary& alpha, const Arrow& f) const;
};

using DerivedSignaturePtr = std::shared_ptr<const DerivedSignature>;

/// Builds Λ/fam. Every boundary assignment is enumerated, realized or not.
/// Throws BudgetExhausted when the sort count would exceed `max_sorts`.
DerivedSignaturePtr derive_signature(SignaturePtr sig, const BottomFamily& fam,
                                     std::uint64_t max_sorts = kDefaultBudget);

/// Name of a derived sort: the parent followed by its boundary tuple.
std::string derived_sort_name(const std::string& parent, const std::vector<std::string>& values);

/// M split into its bottom family and the derived structure M' over Λ/M₀.
struct DerivedStructure {
  DerivedSignaturePtr dsig;
  std::shared_ptr<const Structure> structure;
  /// Per derived sort, the base element behind each derived element.
  std::vector<std::vector<ElemId>> origin;
  /// Per base sort of positive rank and base element: (derived sort, index).
  std::vector<std::vector<std::pair<SortId, ElemId>>> placement;
};

DerivedStructure derive_structure(const Structure& m, std::uint64_t max_sorts = kDefaultBudget);
/// As above, reusing a derived signature built for the same bottom family.
DerivedStructure derive_structure(const Structure& m, DerivedSignaturePtr dsig);

/// ∂ₐM over `jokered` = Λ/(M₀+[K]) whose joker sits at (K, joker):
/// the carrier at (L, β) is M's rank-0 fiber over β with the joker read as a.
Structure partial_structure(const DerivedSignature& jokered, const Structure& m, SortId k,
                            ElemId joker, ElemId a);
/// Convenience form that builds the joker-extended derivative itself.
Structure partial_structure(const Structure& m, SortId k, ElemId a);

/// A rank-preserving semi-functor between signatures, given on generators.
struct SigMorphism {
  SignaturePtr source;
  SignaturePtr target;
  std::vector<SortId> sort_map;
  std::vector<Arrow> gen_map;

  static SigMorphism identity(SignaturePtr sig);
  /// Image of an arrow class: the composite of its generators' images.
  Arrow map_arrow(const Arrow& a) const;
  /// `this` followed by `next`.
  SigMorphism then(const SigMorphism& next) const;
  /// Typing, rank preservation and equation preservation.
  ValidationReport validate() const;
  bool operator==(const SigMorphism& other) const;
};

/// Every induced fanout map is a bijection.
bool is_discrete_opfibration(const SigMorphism& h);

/// α*N: the carrier at K is N(αK), actions go along α's arrow map.
Structure pullback_structure(const SigMorphism& alpha, const Structure& n);

/// Per rank-0 sort of the source signature, element index images.
using FamilyMap = std::vector<std::vector<ElemId>>;

/// ∂H_h from `from` = Λ/famΛ to `to` = Μ/famΜ. Throws InputError unless H is
/// a discrete opfibration and h is well typed.
SigMorphism derived_morphism(const SigMorphism& h, const DerivedSignature& from,
                             const DerivedSignature& to, const FamilyMap& fmap);

/// Λ_{>0}: the sorts of positive rank shifted down one, with their
/// generators and equations.
struct PositivePart {
  SignaturePtr sig;
  /// Base sort -> sort of `sig` (only for positive rank).
  std::map<SortId, SortId> sort_of;
  std::map<GenId, GenId> gen_of;
};
PositivePart positive_part(const Signature& sig);

/// The forgetful projection U: Λ/fam → Λ_{>0}.
SigMorphism forgetful(const DerivedSignature& d, const PositivePart& pos);

/// Inverse of derive_structure: rebuilds a structure over the base
/// signature from a family and a structure over Λ/fam. Element names that
/// collide across derived sorts are disambiguated with the derived sort name.
Structure integrate(const DerivedSignature& d, const Structure& derived, std::string name);

}  // namespace folds

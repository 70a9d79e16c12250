#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "foldskit/derivation.hpp"
#include "foldskit/indiscernibility.hpp"
#include "foldskit/morphisms.hpp"
#include "foldskit/structure.hpp"

namespace folds {

// ---------------------------------------------------------------------------
// Finite categories as composition tables.
// ---------------------------------------------------------------------------

struct CompositionTable {
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Morphism {
    std::string name;
    std::size_t dom = 0;
    std::size_t cod = 0;
    bool operator==(const Morphism&) const = default;
  };

  std::string name;
  std::vector<std::string> objects;
  std::vector<Morphism> arrows;
  /// Identity arrow per object.
  std::vector<std::size_t> identity;
  /// comp[f][g] is g∘f ("f then g"), or kNone when cod f != dom g.
  std::vector<std::vector<std::size_t>> comp;

  std::size_t then(std::size_t f, std::size_t g) const { return comp.at(f).at(g); }
  std::vector<std::size_t> hom(std::size_t a, std::size_t b) const;
  std::size_t object(const std::string& n) const;
  std::size_t arrow(const std::string& n) const;

  /// Typing, totality on composable pairs, unit and associativity laws.
  ValidationReport validate() const;
  bool operator==(const CompositionTable&) const = default;
};

/// One-object category of a monoid with unit 0; mult[x][y] is x·y and the
/// composite "f then g" is g·f.
CompositionTable monoid_table(std::string name, std::vector<std::string> names,
                              const std::vector<std::vector<std::size_t>>& mult);
/// Z/n under addition. Elements are named "0", "1", ... unless names are given.
CompositionTable cyclic_group(std::size_t n, std::vector<std::string> names = {});
/// The category of a partial order; leq[i][j] means pi <= pj.
CompositionTable poset_table(std::string name, std::vector<std::string> objects,
                             const std::vector<std::vector<bool>>& leq);
CompositionTable discrete_category(std::size_t n);
CompositionTable linear_order(std::size_t n);
CompositionTable walking_arrow();
CompositionTable walking_iso();
/// Two objects with two parallel arrows a -> b.
CompositionTable parallel_pair();

/// Multiplication tables of all monoids of order n (1..4) up to isomorphism,
/// unit at 0, each in its lexicographically least form.
std::vector<std::vector<std::vector<std::size_t>>> enumerate_monoids(std::size_t n);
/// Order relations of all posets on n points (1..4) up to isomorphism.
std::vector<std::vector<std::vector<bool>>> enumerate_posets(std::size_t n);

/// Every monoid of order at most 4, every poset on at most 4 points, and the
/// named small categories.
std::vector<CompositionTable> category_catalog();

/// The cat+E structure of a table: T holds exactly the triples (f, g, g∘f),
/// I the identities and E the diagonal.
Structure category_from_table(const CompositionTable& t);
/// Reads a table back from a cat+E structure satisfying the category axioms.
CompositionTable table_from_category(const Structure& m);

/// Arrows a -> b with a two-sided inverse, by exhaustive search.
std::vector<std::size_t> oracle_isos(const CompositionTable& t, std::size_t a, std::size_t b);

/// Checks that dag fixes objects, reverses composition and is an involution.
ValidationReport validate_involution(const CompositionTable& t, const std::vector<std::size_t>& dag);
/// The dagger structure: the cat+E part plus D(o=f, i=dag f). Throws
/// InputError when dag is not a valid involution.
Structure dagger_from_involution(const CompositionTable& t, const std::vector<std::size_t>& dag,
                                 std::string name = "");
/// Isomorphisms a -> b whose inverse is their dagger.
std::vector<std::size_t> oracle_unitaries(const CompositionTable& t,
                                          const std::vector<std::size_t>& dag, std::size_t a,
                                          std::size_t b);
/// Group inversion as an arrow map (for one-object groupoids).
std::vector<std::size_t> inverse_involution(const CompositionTable& t);
std::vector<std::size_t> identity_involution(const CompositionTable& t);

/// Objects x, y; arrows 1x, 1y, f, g: x -> y; E relates every pair of
/// parallel arrows, so f and g are indiscernible yet distinct.
Structure total_e_structure();

/// The name φ assigns to an identity arrow under an indiscernibility a ⋍ b
/// at a rank-0 sort: the arrow a -> b it carries 1_a to. `arrow_sort` holds
/// the arrows and `codomain` is the generator reading off their target.
std::string yoneda_image(const Indiscernibility& phi, const Structure& m,
                         const std::string& arrow_sort, const std::string& codomain,
                         ElemId identity);

// ---------------------------------------------------------------------------
// Binary relations.
// ---------------------------------------------------------------------------

/// A = {a, b}, R empty.
Structure relation_m();
/// A = {a, b, c}, R = {(a, c)}.
Structure relation_n();
/// The inclusion relation_m() -> relation_n().
StructureMorphism relation_inclusion();

// ---------------------------------------------------------------------------
// Multicategories truncated at arity 2.
// ---------------------------------------------------------------------------

struct MultiTable {
  struct Operation {
    std::string name;
    std::vector<std::size_t> inputs;
    std::size_t output = 0;
  };

  std::string name;
  std::vector<std::string> objects;
  std::vector<Operation> ops;
  std::vector<std::size_t> identity;
  /// (g, {f1, ..., fn}) -> g(f1, ..., fn), for the shapes multicat2 records.
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> comp;
};

/// The thin multicategory of a preorder: one operation x1..xn -> y exactly
/// when every xi <= y.
MultiTable thin_multicategory(std::string name, std::vector<std::string> objects,
                              const std::vector<std::vector<bool>>& leq);
/// One object, and a copy of the commutative monoid at every arity;
/// composition multiplies everything.
MultiTable monoid_multicategory(std::string name, std::vector<std::string> names,
                                const std::vector<std::vector<std::size_t>>& mult);
Structure multicategory_structure(const MultiTable& t);
/// Unary operations a -> b with a two-sided unary inverse.
std::vector<std::size_t> oracle_multi_isos(const MultiTable& t, std::size_t a, std::size_t b);

// ---------------------------------------------------------------------------
// Table mutations and shipped structures.
// ---------------------------------------------------------------------------

struct Mutation {
  std::string description;
  Structure structure;
  /// The mutated T still encodes a valid composition table.
  bool still_category = false;
};
/// Every single-entry change of the T carrier: a deleted triple, an extra
/// triple (f, g, h) with h != g∘f, and an overwritten composite.
std::vector<Mutation> composition_mutations(const CompositionTable& t);

/// The structures shipped as assets, keyed by asset name.
std::vector<std::pair<std::string, Structure>> shipped_structures();

// ---------------------------------------------------------------------------
// Random generators for property tests.
// ---------------------------------------------------------------------------

namespace gen {

using Rng = std::mt19937_64;

/// Random signature with at most `max_sorts` sorts and height at most
/// `max_height`, occasionally with equations between length-2 paths.
Signature random_signature(Rng& rng, std::size_t max_height = 3, std::size_t max_sorts = 5,
                           const std::string& name = "R");
BottomFamily random_family(Rng& rng, const Signature& sig, std::size_t max_elements = 3);
/// Random structure satisfying every equation, with at most `max_elements`
/// elements per sort.
Structure random_structure(Rng& rng, SignaturePtr sig, std::size_t max_elements = 3,
                           const std::string& name = "M");
/// A random map from `from` to `to` along the rank-0 sort map of h.
/// Returns nullopt when some nonempty carrier would map into an empty one.
std::optional<FamilyMap> random_family_map(Rng& rng, const SigMorphism& h,
                                           const BottomFamily& from, const BottomFamily& to);

/// The same signature with every sort and label renamed; returns the
/// isomorphism from `sig`.
SigMorphism renaming(const SignaturePtr& sig, const std::string& suffix = "'");
/// The codiagonal Λ ⊔ Λ -> Λ.
SigMorphism fold(const SignaturePtr& sig);
/// Inclusion of the down-closure of a random nonempty set of sorts.
SigMorphism down_closed_inclusion(Rng& rng, const SignaturePtr& sig);

/// A random copy of m with renamed, shuffled elements, and the isomorphism.
std::pair<Structure, StructureMorphism> shuffled_copy(Rng& rng, const Structure& m,
                                                      const std::string& suffix = "'");

/// M with bottom family m0 whose derived structure is exactly the pullback
/// of N's along the family map f0, and the morphism M -> N it induces.
struct PulledBack {
  Structure m;
  StructureMorphism f;
};
PulledBack pullback_along_bottom(const Structure& n, const BottomFamily& m0, const FamilyMap& f0);

}  // namespace gen

}  // namespace folds

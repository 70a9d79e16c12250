#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foldskit/diagnostics.hpp"

namespace folds {

using SortId = std::uint32_t;
using GenId = std::uint32_t;

// ---------------------------------------------------------------------------
// Unresolved declarations, as written in a .fsig file or built by hand.
// ---------------------------------------------------------------------------

struct GeneratorDecl {
  std::string label;
  std::string target;
  std::optional<SourceSpan> span;
};

struct SortDecl {
  std::string id;
  std::size_t rank = 0;
  std::vector<GeneratorDecl> generators;
  std::optional<SourceSpan> span;
};

/// `lhs` and `rhs` list generator labels outside-in: {"c", "t0"} is "c after t0".
/// `source` may be left empty when the innermost labels pin down a unique sort.
struct PathEquation {
  std::string source;
  std::vector<std::string> lhs;
  std::vector<std::string> rhs;
  std::optional<SourceSpan> span;
};

struct SignatureDecl {
  std::string name;
  std::vector<SortDecl> sorts;
  std::vector<PathEquation> equations;
  /// Explicit height; only needed when the top ranks are empty.
  std::optional<std::size_t> height;
};

/// Reports every well-formedness violation: duplicates, dangling references,
/// non-decreasing ranks, and ill-typed or ambiguous equations.
ValidationReport validate_signature(const SignatureDecl& decl);

// ---------------------------------------------------------------------------
// Validated signatures.
// ---------------------------------------------------------------------------

struct Generator {
  std::string label;
  SortId source = 0;
  SortId target = 0;
};

/// Nonempty generator path. `steps[0]` is applied first, so the written form
/// "c.t0" is stored as {t0, c}.
struct Path {
  SortId source = 0;
  std::vector<GenId> steps;

  auto operator<=>(const Path&) const = default;
};

/// A morphism of the inverse semi-category: one class of paths modulo the
/// congruence generated by the equations. `index` numbers the classes out of
/// `source` in canonical order.
struct Arrow {
  SortId source = 0;
  SortId target = 0;
  std::uint32_t index = 0;

  auto operator<=>(const Arrow&) const = default;
};

struct FanoutEntry {
  SortId target = 0;
  Arrow arrow;

  auto operator<=>(const FanoutEntry&) const = default;
};

/// A finite FOLDS-signature: ranked sorts, generating dependency arrows that
/// strictly lower rank, and path equations. Immutable once constructed.
class Signature {
 public:
  struct SortSpec {
    std::string id;
    std::size_t rank = 0;
    std::vector<std::pair<std::string, SortId>> generators;
    bool operator==(const SortSpec&) const = default;
  };
  struct Equation {
    Path lhs;
    Path rhs;
    auto operator<=>(const Equation&) const = default;
  };

  Signature() = default;
  /// Builds from resolved data; throws InputError on rank or typing violations.
  Signature(std::string name, std::vector<SortSpec> sorts, std::vector<Equation> equations,
            std::optional<std::size_t> height = std::nullopt);

  /// Resolves names and validates; throws InputError carrying the full report.
  static Signature from_decl(const SignatureDecl& decl);

  const std::string& name() const { return name_; }
  std::size_t height() const { return height_; }
  std::size_t sort_count() const { return sorts_.size(); }
  std::size_t generator_count() const { return generators_.size(); }

  const std::string& sort_name(SortId k) const { return sorts_.at(k).id; }
  std::size_t rank(SortId k) const { return sorts_.at(k).rank; }
  std::span<const GenId> generators_of(SortId k) const { return sort_generators_.at(k); }
  const Generator& generator(GenId g) const { return generators_.at(g); }
  std::optional<GenId> find_generator(SortId k, const std::string& label) const;
  /// Position of `g` in its source sort's generator list.
  std::size_t local_index(GenId g) const { return local_index_.at(g); }

  std::optional<SortId> find_sort(const std::string& id) const;
  /// Throws InputError for unknown sorts.
  SortId sort(const std::string& id) const;
  std::vector<SortId> sorts_of_rank(std::size_t r) const;

  const std::vector<Equation>& equations() const { return equations_; }

  /// All arrows K -> L, canonical order. Throws InputError on unknown sorts.
  std::vector<Arrow> hom_set(SortId k, SortId l) const;
  /// All arrows out of K: by target declaration order, then representative.
  const std::vector<Arrow>& arrows_from(SortId k) const { return out_.at(k).arrows; }
  /// `f` followed by `g`; throws InputError when the endpoints do not meet.
  Arrow compose(const Arrow& f, const Arrow& g) const;
  Arrow classify(const Path& p) const;
  Arrow generator_arrow(GenId g) const;
  /// Lexicographically least path of the class, in declaration order.
  const Path& representative(const Arrow& a) const;

  /// (L, f) for every L of rank m and f: K -> L. Throws when m >= rank(K).
  std::vector<FanoutEntry> fanout(SortId k, std::size_t m) const;
  /// Fanout entries at every rank below rank(K), rank ascending.
  std::vector<FanoutEntry> full_fanout(SortId k) const;

  std::string format_path(const Path& p) const;
  std::string format_arrow(const Arrow& a) const { return format_path(representative(a)); }

  /// Declarations reproducing this signature (equations fully qualified).
  SignatureDecl decl() const;

  /// Structural equality: names, ranks, generators, equations and height.
  bool operator==(const Signature& other) const;

 private:
  struct OutClasses {
    std::map<std::vector<GenId>, std::uint32_t> path_class;
    std::vector<Path> reps;
    std::vector<Arrow> arrows;
  };

  void build_classes();

  std::string name_;
  std::vector<SortSpec> sorts_;
  std::vector<Equation> equations_;
  std::size_t height_ = 0;
  std::optional<std::size_t> declared_height_;
  std::vector<Generator> generators_;
  std::vector<std::vector<GenId>> sort_generators_;
  std::vector<std::size_t> local_index_;
  std::map<std::string, SortId> sort_index_;
  std::vector<OutClasses> out_;
};

}  // namespace folds

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "foldskit/morphisms.hpp"
#include "foldskit/structure.hpp"

namespace folds {

struct Binding {
  std::string label;
  std::string var;

  bool operator==(const Binding&) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Surface syntax of an axiom. Quantifiers bind one variable of a sort whose
/// generators are each bound to an earlier variable.
struct Formula {
  enum class Kind { True, False, Not, And, Or, Implies, Iff, Forall, Exists, Inhabited, Equal };

  Kind kind = Kind::True;
  std::vector<FormulaPtr> args;
  std::string var;
  std::string sort;
  std::vector<Binding> bindings;
  std::string lhs;
  std::string rhs;
  std::optional<SourceSpan> span;

  static FormulaPtr truth(bool value);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr binary(Kind kind, FormulaPtr a, FormulaPtr b);
  static FormulaPtr quantifier(Kind kind, std::string var, std::string sort,
                               std::vector<Binding> bindings, FormulaPtr body);
  static FormulaPtr inhabited(std::string sort, std::vector<Binding> bindings);
  static FormulaPtr equal(std::string lhs, std::string rhs);
};

/// Syntactic equality, ignoring source spans.
bool same_formula(const Formula& a, const Formula& b);

/// A type-checked formula: variables resolved to slots, sorts to ids.
struct Elaborated {
  Formula::Kind kind = Formula::Kind::True;
  std::vector<std::shared_ptr<const Elaborated>> args;
  std::size_t slot = 0;
  SortId sort = 0;
  std::vector<std::size_t> generator_slots;
  std::size_t lhs = 0;
  std::size_t rhs = 0;
};

struct ElaboratedFormula {
  FormulaPtr source;
  std::shared_ptr<const Elaborated> root;
  std::vector<std::string> slot_names;
  std::vector<SortId> slot_sorts;
};

/// Scope and sort checking, including agreement of shared lower boundaries
/// forced by the path equations. Throws InputError at the offending node.
ElaboratedFormula elaborate(const Signature& sig, const FormulaPtr& f);

/// Classical evaluation; quantifiers range over the fiber at the bound boundary.
bool eval(const Structure& m, const ElaboratedFormula& f);

struct Axiom {
  std::string name;
  FormulaPtr formula;
  ElaboratedFormula elaborated;
  std::optional<SourceSpan> span;
};

struct Theory {
  std::string name;
  SignaturePtr sig;
  std::vector<Axiom> axioms;

  /// Elaborates every axiom; throws InputError on the first ill-typed one.
  static Theory make(std::string name, SignaturePtr sig,
                     std::vector<std::pair<std::string, FormulaPtr>> axioms);
};

struct AxiomResult {
  std::string name;
  bool holds = true;
  /// Variable assignment for the leading universal quantifiers under which
  /// the axiom fails; empty when it holds.
  std::vector<std::pair<std::string, std::string>> countermodel;
};

struct TheoryReport {
  std::vector<AxiomResult> results;

  bool all_hold() const;
  std::string to_string() const;
};

TheoryReport check_theory(const Structure& m, const Theory& t);

struct InvarianceReport {
  bool applicable = true;
  std::string note;
  /// Axiom name with its verdicts in M and in N.
  std::vector<std::tuple<std::string, bool, bool>> verdicts;

  bool agree() const;
  std::string to_string() const;
};

/// For univalent M, N and a split surjective equivalence f: M → N, every
/// axiom has the same truth value in both; reports "not applicable" otherwise.
InvarianceReport invariance_check(const Theory& t, const Structure& m, const Structure& n,
                                  const StructureMorphism& f,
                                  std::uint64_t budget = kDefaultBudget);

}  // namespace folds

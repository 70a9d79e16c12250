#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "foldskit/signature.hpp"

namespace folds {

using ElemId = std::uint32_t;
using SignaturePtr = std::shared_ptr<const Signature>;

/// One element of a carrier as written: its name and the value of each
/// generating arrow, keyed by label.
struct ElementDecl {
  std::string name;
  std::vector<std::pair<std::string, std::string>> images;
  std::optional<SourceSpan> span;
};

struct CarrierDecl {
  std::string sort;
  std::vector<ElementDecl> elements;
  std::optional<SourceSpan> span;
};

struct StructureDecl {
  std::string name;
  std::string signature;
  std::vector<CarrierDecl> carriers;
};

/// Values along a fanout, aligned with Signature::fanout or full_fanout.
using Boundary = std::vector<ElemId>;

/// A finite-set-valued functor on a signature. Elements are indices into
/// per-sort name tables; actions are stored only for generating arrows.
class Structure {
 public:
  Structure() = default;
  /// Unchecked construction. `actions[g][e]` is the image of element e of
  /// generator g's source. Use validate_structure or `checked` to verify.
  Structure(SignaturePtr sig, std::string name, std::vector<std::vector<std::string>> elements,
            std::vector<std::vector<ElemId>> actions);

  /// Constructs and validates, throwing InputError with every violation.
  static Structure checked(SignaturePtr sig, std::string name,
                           std::vector<std::vector<std::string>> elements,
                           std::vector<std::vector<ElemId>> actions);
  /// Resolves element names against `sig`; throws InputError on any problem.
  static Structure from_decl(SignaturePtr sig, const StructureDecl& decl);

  const Signature& signature() const { return *sig_; }
  const SignaturePtr& signature_ptr() const { return sig_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  std::size_t size(SortId k) const { return elements_.at(k).size(); }
  const std::vector<std::string>& elements(SortId k) const { return elements_.at(k); }
  const std::string& element_name(SortId k, ElemId e) const { return elements_.at(k).at(e); }
  std::optional<ElemId> find_element(SortId k, const std::string& name) const;
  /// Throws InputError for unknown elements.
  ElemId element(SortId k, const std::string& name) const;

  const std::vector<ElemId>& action(GenId g) const { return actions_.at(g); }
  ElemId act(GenId g, ElemId e) const { return actions_.at(g).at(e); }
  /// Image of `e` along a path (steps applied in order).
  ElemId act(const Path& p, ElemId e) const;
  ElemId act(const Arrow& a, ElemId e) const;

  /// Values of `e` along fanout(K, m).
  Boundary boundary(SortId k, ElemId e, std::size_t m) const;
  /// Values of `e` along full_fanout(K).
  Boundary full_boundary(SortId k, ElemId e) const;
  /// Generator images of `e`, in declaration order.
  Boundary generator_images(SortId k, ElemId e) const;

  /// Elements of K whose rank-0 boundary equals `beta`. Throws on ill-typed beta.
  std::vector<ElemId> fiber0(SortId k, const Boundary& beta) const;
  /// Elements of K whose full boundary equals `beta`; throws InputError when
  /// `beta` is not itself a compatible boundary.
  std::vector<ElemId> full_fiber(SortId k, const Boundary& beta) const;

  /// Same signature (structurally), names and actions.
  bool operator==(const Structure& other) const;

  StructureDecl decl() const;

 private:
  SignaturePtr sig_;
  std::string name_;
  std::vector<std::vector<std::string>> elements_;
  std::vector<std::vector<ElemId>> actions_;
  std::vector<std::map<std::string, ElemId>> index_;
};

/// Every typing problem and every equation violated at every element.
ValidationReport validate_structure(const Structure& m);

/// Builds a name table "e0", "e1", ... of the given size.
std::vector<std::string> numbered_names(std::size_t n, const std::string& prefix = "e");

}  // namespace folds

#pragma once

#include <string>
#include <vector>

#include "foldskit/logic.hpp"
#include "foldskit/signature.hpp"
#include "foldskit/structure.hpp"

namespace folds {

/// What a DSL text declares, read from its header.
struct DslHeader {
  enum class Kind { signature, structure, theory };
  Kind kind = Kind::signature;
  std::string name;
  std::string over;  ///< signature name for structures and theories
};

struct TheoryDecl {
  struct Entry {
    std::string name;
    FormulaPtr formula;
    SourceSpan span;
  };
  std::string name;
  std::string signature;
  std::vector<Entry> axioms;
};

/// All parse functions throw InputError whose diagnostics carry spans
/// inside `text`; `file` only labels them.
DslHeader parse_header(const std::string& text, const std::string& file = "<input>");

SignatureDecl parse_signature_decl(const std::string& text, const std::string& file = "<input>");
Signature parse_signature(const std::string& text, const std::string& file = "<input>");

StructureDecl parse_structure_decl(const std::string& text, const std::string& file = "<input>");
/// The structure's `over` clause must name `sig`.
Structure parse_structure(const std::string& text, SignaturePtr sig,
                          const std::string& file = "<input>");

TheoryDecl parse_theory_decl(const std::string& text, const std::string& file = "<input>");
Theory parse_theory(const std::string& text, SignaturePtr sig,
                    const std::string& file = "<input>");

/// A single formula, as it would appear after "axiom NAME:".
FormulaPtr parse_formula(const std::string& text, const std::string& file = "<input>");

/// Canonical text; parsing it back yields a structurally equal object.
std::string serialize(const Signature& sig);
std::string serialize(const Structure& m);
std::string serialize(const Theory& t);
std::string format_formula(const Formula& f);

/// A name as the DSL writes it: bare when it is a plain identifier, quoted otherwise.
std::string format_name(const std::string& name);

}  // namespace folds

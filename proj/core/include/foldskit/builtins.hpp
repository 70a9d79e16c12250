#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "foldskit/logic.hpp"
#include "foldskit/signature.hpp"
#include "foldskit/structure.hpp"

namespace folds {

enum class AssetKind { signature, theory, structure };

std::string to_string(AssetKind kind);

namespace detail {
struct EmbeddedAsset {
  AssetKind kind;
  const char* name;
  const char* file;
  const char* text;
};
/// Defined in a translation unit generated from the assets directory.
const std::vector<EmbeddedAsset>& embedded_assets();
}  // namespace detail

/// Names of the shipped assets of one kind, sorted.
std::vector<std::string> builtin_names(AssetKind kind);
std::optional<AssetKind> builtin_kind(const std::string& name);
/// Shipped DSL text; throws InputError for unknown names.
const std::string& builtin_text(AssetKind kind, const std::string& name);
/// Relative path of the asset inside the assets directory.
std::string builtin_path(AssetKind kind, const std::string& name);

/// Parsed builtins, cached after the first request. Thread-safe.
SignaturePtr builtin_signature(const std::string& name);
std::shared_ptr<const Theory> builtin_theory(const std::string& name);
std::shared_ptr<const Structure> builtin_structure(const std::string& name);

}  // namespace folds

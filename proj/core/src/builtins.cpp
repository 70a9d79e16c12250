#include "foldskit/builtins.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "foldskit/dsl.hpp"

namespace folds {

namespace {

const detail::EmbeddedAsset* find_asset(AssetKind kind, const std::string& name) {
  for (const auto& a : detail::embedded_assets()) {
    if (a.kind == kind && name == a.name) return &a;
  }
  return nullptr;
}

const detail::EmbeddedAsset& require_asset(AssetKind kind, const std::string& name) {
  const auto* a = find_asset(kind, name);
  if (!a) throw InputError("unknown builtin " + to_string(kind) + " '" + name + "'");
  return *a;
}

struct Cache {
  std::recursive_mutex mutex;
  std::map<std::string, SignaturePtr> signatures;
  std::map<std::string, std::shared_ptr<const Theory>> theories;
  std::map<std::string, std::shared_ptr<const Structure>> structures;
  std::map<std::string, std::string> texts;
};

Cache& cache() {
  static Cache c;
  return c;
}

}  // namespace

std::string to_string(AssetKind kind) {
  switch (kind) {
    case AssetKind::signature: return "signature";
    case AssetKind::theory: return "theory";
    case AssetKind::structure: return "structure";
  }
  return "asset";
}

std::vector<std::string> builtin_names(AssetKind kind) {
  std::vector<std::string> out;
  for (const auto& a : detail::embedded_assets()) {
    if (a.kind == kind) out.emplace_back(a.name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<AssetKind> builtin_kind(const std::string& name) {
  for (auto kind : {AssetKind::signature, AssetKind::theory, AssetKind::structure}) {
    if (find_asset(kind, name)) return kind;
  }
  return std::nullopt;
}

const std::string& builtin_text(AssetKind kind, const std::string& name) {
  const auto& a = require_asset(kind, name);
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  auto key = to_string(kind) + ":" + name;
  auto it = c.texts.find(key);
  if (it == c.texts.end()) it = c.texts.emplace(key, a.text).first;
  return it->second;
}

std::string builtin_path(AssetKind kind, const std::string& name) {
  const auto& a = require_asset(kind, name);
  switch (kind) {
    case AssetKind::signature: return std::string("signatures/") + a.file;
    case AssetKind::theory: return std::string("theories/") + a.file;
    case AssetKind::structure: return std::string("structures/") + a.file;
  }
  return a.file;
}

SignaturePtr builtin_signature(const std::string& name) {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  auto it = c.signatures.find(name);
  if (it != c.signatures.end()) return it->second;
  const auto& a = require_asset(AssetKind::signature, name);
  auto sig = std::make_shared<const Signature>(parse_signature(a.text, a.file));
  c.signatures.emplace(name, sig);
  return sig;
}

std::shared_ptr<const Theory> builtin_theory(const std::string& name) {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  auto it = c.theories.find(name);
  if (it != c.theories.end()) return it->second;
  const auto& a = require_asset(AssetKind::theory, name);
  auto header = parse_header(a.text, a.file);
  auto t = std::make_shared<const Theory>(parse_theory(a.text, builtin_signature(header.over), a.file));
  c.theories.emplace(name, t);
  return t;
}

std::shared_ptr<const Structure> builtin_structure(const std::string& name) {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  auto it = c.structures.find(name);
  if (it != c.structures.end()) return it->second;
  const auto& a = require_asset(AssetKind::structure, name);
  auto header = parse_header(a.text, a.file);
  auto m = std::make_shared<const Structure>(
      parse_structure(a.text, builtin_signature(header.over), a.file));
  c.structures.emplace(name, m);
  return m;
}

}  // namespace folds

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "foldskit/builtins.hpp"
#include "foldskit/derivation.hpp"
#include "foldskit/dsl.hpp"
#include "foldskit/indiscernibility.hpp"
#include "foldskit/logic.hpp"
#include "foldskit/morphisms.hpp"

namespace folds::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Outcome {
  int code = kOk;
  std::string text;
  json result = json::object();
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read '" + p.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool is_file(const std::string& ref) {
  std::error_code ec;
  return fs::is_regular_file(ref, ec);
}

/// Resolves names given on the command line: a path to a DSL file, a name
/// declared in a --with file, or a builtin. A structure or theory file looks
/// for its signature among the --with files, then NAME.fsig next to itself,
/// then the builtins.
class Workspace {
 public:
  explicit Workspace(const std::vector<std::string>& with) {
    for (const auto& path : with) {
      auto text = read_file(path);
      auto h = parse_header(text, path);
      with_[{h.kind, h.name}] = {path, std::move(text)};
    }
  }

  SignaturePtr signature(const std::string& ref) {
    if (is_file(ref)) {
      auto text = read_file(ref);
      auto sig = std::make_shared<const Signature>(parse_signature(text, ref));
      return remember(sig);
    }
    return signature_named(ref, {});
  }

  std::shared_ptr<const Structure> structure(const std::string& ref) {
    auto [path, text] = locate(DslHeader::Kind::structure, ref);
    if (path.empty()) return builtin_structure(ref);
    auto h = parse_header(text, path);
    if (h.kind != DslHeader::Kind::structure) throw InputError("'" + ref + "' is not a structure");
    auto sig = signature_named(h.over, fs::path(path).parent_path());
    return std::make_shared<const Structure>(parse_structure(text, sig, path));
  }

  std::shared_ptr<const Theory> theory(const std::string& ref) {
    auto [path, text] = locate(DslHeader::Kind::theory, ref);
    if (path.empty()) return builtin_theory(ref);
    auto h = parse_header(text, path);
    if (h.kind != DslHeader::Kind::theory) throw InputError("'" + ref + "' is not a theory");
    auto sig = signature_named(h.over, fs::path(path).parent_path());
    return std::make_shared<const Theory>(parse_theory(text, sig, path));
  }

  /// Parses any asset file and describes it in one line.
  std::string validate(const std::string& ref) {
    std::string path = ref, text;
    if (is_file(ref)) {
      text = read_file(ref);
    } else if (auto kind = builtin_kind(ref)) {
      text = builtin_text(*kind, ref);
      path = builtin_path(*kind, ref);
    } else {
      throw InputError("no file or builtin named '" + ref + "'");
    }
    auto h = parse_header(text, path);
    fs::path dir = is_file(ref) ? fs::path(ref).parent_path() : fs::path();
    std::ostringstream os;
    switch (h.kind) {
      case DslHeader::Kind::signature: {
        auto sig = parse_signature(text, path);
        os << "signature " << sig.name() << " (" << sig.sort_count() << " sorts, height "
           << sig.height() << ")";
        break;
      }
      case DslHeader::Kind::structure: {
        auto m = parse_structure(text, signature_named(h.over, dir), path);
        std::size_t n = 0;
        for (SortId k = 0; k < m.signature().sort_count(); ++k) n += m.size(k);
        os << "structure " << m.name() << " over " << h.over << " (" << n << " elements)";
        break;
      }
      case DslHeader::Kind::theory: {
        auto t = parse_theory(text, signature_named(h.over, dir), path);
        os << "theory " << t.name << " over " << h.over << " (" << t.axioms.size() << " axioms)";
        break;
      }
    }
    return os.str();
  }

 private:
  std::pair<std::string, std::string> locate(DslHeader::Kind kind, const std::string& ref) {
    if (is_file(ref)) return {ref, read_file(ref)};
    auto it = with_.find({kind, ref});
    if (it != with_.end()) return it->second;
    return {};
  }

  SignaturePtr remember(SignaturePtr sig) {
    auto [it, inserted] = sigs_.emplace(sig->name(), sig);
    if (!inserted && !(*it->second == *sig)) {
      throw InputError("two different signatures are named '" + sig->name() + "'");
    }
    return it->second;
  }

  SignaturePtr signature_named(const std::string& name, const fs::path& dir) {
    if (auto it = sigs_.find(name); it != sigs_.end()) return it->second;
    if (auto it = with_.find({DslHeader::Kind::signature, name}); it != with_.end()) {
      return remember(std::make_shared<const Signature>(
          parse_signature(it->second.second, it->second.first)));
    }
    if (!dir.empty()) {
      auto sibling = dir / (name + ".fsig");
      if (is_file(sibling.string())) {
        auto text = read_file(sibling);
        if (parse_header(text, sibling.string()).name == name) {
          return remember(
              std::make_shared<const Signature>(parse_signature(text, sibling.string())));
        }
      }
    }
    if (builtin_kind(name) == AssetKind::signature) return remember(builtin_signature(name));
    throw InputError("unknown signature '" + name + "' (not a file, a --with file or a builtin)");
  }

  std::map<std::pair<DslHeader::Kind, std::string>, std::pair<std::string, std::string>> with_;
  std::map<std::string, SignaturePtr> sigs_;
};

/// Splits "a,b" into two element names of sort K; names may contain commas.
std::pair<ElemId, ElemId> split_pair(const Structure& m, SortId k, const std::string& pair) {
  std::vector<std::pair<ElemId, ElemId>> found;
  for (std::size_t i = pair.find(','); i != std::string::npos; i = pair.find(',', i + 1)) {
    auto a = m.find_element(k, pair.substr(0, i));
    auto b = m.find_element(k, pair.substr(i + 1));
    if (a && b) found.emplace_back(*a, *b);
  }
  const auto& sort = m.signature().sort_name(k);
  if (found.empty()) {
    throw InputError("--pair '" + pair + "' does not name two elements of sort " + sort);
  }
  if (found.size() > 1) throw InputError("--pair '" + pair + "' is ambiguous at sort " + sort);
  return found.front();
}

json morphism_json(const Structure& m, const Structure& n, const StructureMorphism& f) {
  json maps = json::object();
  const auto& s = m.signature();
  for (SortId k = 0; k < s.sort_count(); ++k) {
    json sort = json::object();
    for (ElemId e = 0; e < m.size(k); ++e) {
      sort[m.element_name(k, e)] = n.element_name(k, f.maps[k][e]);
    }
    maps[s.sort_name(k)] = std::move(sort);
  }
  return maps;
}

json indiscernibility_json(const Indiscernibility& phi) {
  json maps = json::object();
  const auto& ds = *phi.context->dsig->sig;
  for (SortId t : phi.context->order) {
    json sort = json::object();
    for (ElemId x = 0; x < phi.from->size(t); ++x) {
      sort[phi.from->element_name(t, x)] = phi.to->element_name(t, phi.apply(t, x));
    }
    maps[ds.sort_name(t)] = std::move(sort);
  }
  return maps;
}

std::string indiscernibility_text(const Indiscernibility& phi) {
  std::ostringstream os;
  const auto& ds = *phi.context->dsig->sig;
  for (SortId t : phi.context->order) {
    if (phi.from->size(t) == 0) continue;
    os << "    " << ds.sort_name(t) << ":";
    for (ElemId x = 0; x < phi.from->size(t); ++x) {
      os << (x ? ", " : " ") << phi.from->element_name(t, x) << " -> "
         << phi.to->element_name(t, phi.apply(t, x));
    }
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

Outcome cmd_validate(Workspace& ws, const std::vector<std::string>& files,
                     std::vector<Diagnostic>& diags) {
  Outcome o;
  std::ostringstream os;
  json list = json::array();
  for (const auto& f : files) {
    try {
      auto what = ws.validate(f);
      os << f << ": ok, " << what << "\n";
      list.push_back({{"file", f}, {"ok", true}, {"description", what}});
    } catch (const InputError& e) {
      os << f << ": error\n";
      list.push_back({{"file", f}, {"ok", false}});
      diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
      o.code = kInputError;
    }
  }
  o.text = os.str();
  o.result = {{"files", list}, {"verdict", o.code == kOk}};
  return o;
}

Outcome cmd_derive(Workspace& ws, const std::string& ref, const std::string& family,
                   const std::string& out_file, std::uint64_t budget) {
  auto sig = ws.signature(ref);
  auto d = derive_signature(sig, parse_family(*sig, family), budget);
  const auto& ds = *d->sig;
  Outcome o;
  std::string text = serialize(ds);
  json sorts = json::array();
  for (SortId t = 0; t < ds.sort_count(); ++t) {
    sorts.push_back({{"name", ds.sort_name(t)},
                     {"rank", ds.rank(t)},
                     {"parent", sig->sort_name(d->parent[t])}});
  }
  o.result = {{"signature", ds.name()}, {"height", ds.height()}, {"sorts", sorts}};
  if (out_file.empty()) {
    o.text = text;
    o.result["text"] = text;
  } else {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw InputError("cannot write '" + out_file + "'");
    out << text;
    o.text = "wrote " + out_file + " (" + std::to_string(ds.sort_count()) + " sorts)\n";
    o.result["out"] = out_file;
  }
  return o;
}

Outcome cmd_indisc(Workspace& ws, const std::string& ref, const std::string& sort,
                   const std::string& pair, bool list, std::uint64_t budget) {
  auto m = ws.structure(ref);
  SortId k = m->signature().sort(sort);
  auto [a, b] = split_pair(*m, k, pair);
  std::vector<Indiscernibility> found;
  std::size_t count = 0;
  std::string where = sort;
  if (m->signature().rank(k) == 0) {
    IndiscernibilityEngine engine(m, budget);
    if (list) {
      found = engine.list(k, a, b);
      count = found.size();
    } else {
      count = engine.count(k, a, b);
    }
  } else {
    auto lv = indiscernibilities_at(*m, k, a, b, budget);
    where = lv.level->signature().sort_name(lv.sort);
    found = std::move(lv.list);
    count = found.size();
  }
  Outcome o;
  std::ostringstream os;
  os << "indiscernibilities " << m->element_name(k, a) << " ~ " << m->element_name(k, b)
     << " at " << where << "\n";
  os << "count: " << count << "\n";
  json items = json::array();
  if (list) {
    for (std::size_t i = 0; i < found.size(); ++i) {
      os << "  #" << i << "\n" << indiscernibility_text(found[i]);
      items.push_back(indiscernibility_json(found[i]));
    }
  }
  o.text = os.str();
  o.result = {{"structure", m->name()},
              {"sort", sort},
              {"level_sort", where},
              {"a", m->element_name(k, a)},
              {"b", m->element_name(k, b)},
              {"count", count}};
  if (list) o.result["indiscernibilities"] = items;
  return o;
}

Outcome cmd_univalence(Workspace& ws, const std::string& ref, bool per_sort,
                       std::uint64_t budget) {
  auto m = ws.structure(ref);
  auto r = is_univalent(*m, budget);
  Outcome o;
  o.code = r.univalent ? kOk : kFalse;
  std::ostringstream os;
  os << r.to_string();
  json levels = json::array();
  for (const auto& lv : r.levels) {
    json j = {{"level", lv.level}, {"signature", lv.signature}, {"ok", lv.ok}};
    if (lv.failure) {
      const auto& f = *lv.failure;
      j["failure"] = {{"sort", f.sort}, {"a", f.a}, {"b", f.b}, {"count", f.count}};
    }
    levels.push_back(std::move(j));
  }
  json sorts = json::object();
  if (per_sort) {
    for (const auto& [name, ok] : r.per_sort) {
      os << "  sort " << name << ": " << (ok ? "true" : "false") << "\n";
      sorts[name] = ok;
    }
  }
  o.text = os.str();
  o.result = {{"structure", m->name()}, {"verdict", r.univalent}, {"levels", levels}};
  if (per_sort) o.result["per_sort"] = sorts;
  return o;
}

Outcome cmd_check(Workspace& ws, const std::string& ref, const std::string& thy) {
  auto m = ws.structure(ref);
  auto t = ws.theory(thy);
  auto r = check_theory(*m, *t);
  Outcome o;
  o.code = r.all_hold() ? kOk : kFalse;
  o.text = r.to_string() + "all axioms hold: " + (r.all_hold() ? "true" : "false") + "\n";
  json axioms = json::array();
  for (const auto& a : r.results) {
    json cm = json::object();
    for (const auto& [v, e] : a.countermodel) cm[v] = e;
    axioms.push_back({{"name", a.name}, {"holds", a.holds}, {"countermodel", cm}});
  }
  o.result = {{"structure", m->name()}, {"theory", t->name}, {"verdict", r.all_hold()},
              {"axioms", axioms}};
  return o;
}

Outcome cmd_hom(Workspace& ws, const std::string& mref, const std::string& nref,
                const std::string& mode, std::uint64_t budget) {
  auto m = ws.structure(mref);
  auto n = ws.structure(nref);
  auto all = enumerate_morphisms(*m, *n, budget);
  std::vector<StructureMorphism> kept;
  for (auto& f : all) {
    bool keep = mode == "all" || (mode == "iso" && is_iso(*m, *n, f)) ||
                (mode == "sse" && is_sse(*m, *n, f, budget)) ||
                (mode == "equiv" && is_equivalence(*m, *n, f, budget));
    if (keep) kept.push_back(std::move(f));
  }
  Outcome o;
  std::ostringstream os;
  os << "morphisms (" << mode << "): " << kept.size() << "\n";
  json items = json::array();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    os << "  #" << i << " " << format_morphism(*m, *n, kept[i]) << "\n";
    items.push_back(morphism_json(*m, *n, kept[i]));
  }
  o.text = os.str();
  o.result = {{"from", m->name()}, {"to", n->name()}, {"mode", mode},
              {"count", kept.size()}, {"morphisms", items}};
  return o;
}

Outcome cmd_hsip(Workspace& ws, const std::string& mref, const std::string& nref,
                 std::uint64_t budget) {
  auto m = ws.structure(mref);
  auto n = ws.structure(nref);
  auto r = hsip_check(*m, *n, budget);
  Outcome o;
  bool verdict = r.applicable && r.ok();
  o.code = verdict ? kOk : kFalse;
  o.text = r.to_string() + "hsip: " + (verdict ? "true" : "false") + "\n";
  o.result = {{"from", m->name()},
              {"to", n->name()},
              {"verdict", verdict},
              {"applicable", r.applicable},
              {"note", r.note},
              {"morphisms", r.morphisms},
              {"sse", r.sse},
              {"isos", r.isos},
              {"equivalences", r.equivalences},
              {"codomain_univalent", r.codomain_univalent},
              {"counterexamples", r.counterexamples}};
  return o;
}

Outcome cmd_builtin(bool list, const std::string& dump) {
  Outcome o;
  if (list == !dump.empty()) throw InputError("builtin needs exactly one of --list or --dump NAME");
  if (list) {
    std::ostringstream os;
    json items = json::array();
    for (auto kind : {AssetKind::signature, AssetKind::theory, AssetKind::structure}) {
      for (const auto& name : builtin_names(kind)) {
        os << to_string(kind) << " " << name << "\n";
        items.push_back({{"kind", to_string(kind)}, {"name", name},
                         {"path", builtin_path(kind, name)}});
      }
    }
    o.text = os.str();
    o.result = {{"assets", items}};
    return o;
  }
  auto kind = builtin_kind(dump);
  if (!kind) throw InputError("unknown builtin '" + dump + "'");
  o.text = builtin_text(*kind, dump);
  o.result = {{"kind", to_string(*kind)}, {"name", dump}, {"text", o.text}};
  return o;
}

json diagnostics_json(const std::vector<Diagnostic>& diags) {
  json out = json::array();
  for (const auto& d : diags) {
    json j = {{"message", d.message}};
    if (d.span && d.span->valid()) {
      j["span"] = {{"file", d.span->file},
                   {"line", d.span->line},
                   {"column", d.span->column},
                   {"length", d.span->length}};
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv("FOLDSKIT_BUDGET")) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(env, &used);
      if (used == std::string(env).size() && v > 0) return v;
    } catch (const std::exception&) {
    }
    throw InputError(std::string("FOLDSKIT_BUDGET must be a positive integer, got '") + env + "'");
  }
  return kDefaultBudget;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite FOLDS signatures, structures, indiscernibilities and univalence.",
               "foldskit"};
  app.require_subcommand(1);
  std::string format = "text";
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> with;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--budget", budget, "Search node budget (default 10000000 or $FOLDSKIT_BUDGET)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for randomized utilities");
  app.add_option("--with", with, "Extra DSL files to resolve names against");

  std::vector<std::string> files;
  auto* validate = app.add_subcommand("validate", "Parse and check DSL files or builtins");
  validate->add_option("files", files, "Files or builtin names")->required();

  std::string target, family, out_file;
  auto* derive = app.add_subcommand("derive", "Print the derived signature for a family");
  derive->add_option("signature", target, "Signature file or builtin")->required();
  derive->add_option("--family", family, "Rank-0 family, e.g. \"O={a,b}\"")->required();
  derive->add_option("--out", out_file, "Write the derived signature to a file");

  std::string sort, pair;
  bool list = false;
  auto* indisc = app.add_subcommand("indisc", "Count or list indiscernibilities a ~ b");
  indisc->add_option("structure", target, "Structure file or builtin")->required();
  indisc->add_option("--sort", sort, "Sort of a and b")->required();
  indisc->add_option("--pair", pair, "Elements as a,b")->required();
  indisc->add_flag("--list", list, "List every indiscernibility");
  indisc->add_option("--budget", budget, "Search node budget")->check(CLI::PositiveNumber);

  bool per_sort = false;
  auto* univalence = app.add_subcommand("univalence", "Decide univalence at every level");
  univalence->add_option("structure", target, "Structure file or builtin")->required();
  univalence->add_flag("--per-sort", per_sort, "Also report each rank-0 sort");

  std::string theory;
  auto* check = app.add_subcommand("check", "Evaluate a theory's axioms in a structure");
  check->add_option("structure", target, "Structure file or builtin")->required();
  check->add_option("--theory", theory, "Theory file or builtin")->required();

  std::string second;
  bool iso = false, sse = false, equiv = false, all = false;
  auto* hom = app.add_subcommand("hom", "Enumerate structure morphisms M -> N");
  hom->add_option("M", target, "Domain structure")->required();
  hom->add_option("N", second, "Codomain structure")->required();
  hom->add_flag("--iso", iso, "Isomorphisms only");
  hom->add_flag("--sse", sse, "Split surjective equivalences only");
  hom->add_flag("--equiv", equiv, "Equivalences only");
  hom->add_flag("--all", all, "Every morphism");
  hom->add_option("--budget", budget, "Search node budget")->check(CLI::PositiveNumber);

  auto* hsip = app.add_subcommand("hsip", "Check equivalences against identifications");
  hsip->add_option("M", target, "Domain structure")->required();
  hsip->add_option("N", second, "Codomain structure")->required();

  std::string dump;
  auto* builtin = app.add_subcommand("builtin", "List or print shipped assets");
  builtin->add_flag("--list", list, "List every builtin");
  builtin->add_option("--dump", dump, "Print one builtin's DSL text");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "error: " << e.what() << "\n" << sub->help();
    return kInputError;
  }

  bool json_mode = format == "json";
  const auto* cmd = app.get_subcommands().front();
  Outcome o;
  std::vector<Diagnostic> diags;
  std::string status = "ok";
  try {
    if (budget == 0) budget = default_budget();
    Workspace ws(with);
    if (cmd == validate) {
      o = cmd_validate(ws, files, diags);
    } else if (cmd == derive) {
      o = cmd_derive(ws, target, family, out_file, budget);
    } else if (cmd == indisc) {
      o = cmd_indisc(ws, target, sort, pair, list, budget);
    } else if (cmd == univalence) {
      o = cmd_univalence(ws, target, per_sort, budget);
    } else if (cmd == check) {
      o = cmd_check(ws, target, theory);
    } else if (cmd == hom) {
      int modes = int(iso) + int(sse) + int(equiv) + int(all);
      if (modes != 1) throw InputError("hom needs exactly one of --iso, --sse, --equiv, --all");
      o = cmd_hom(ws, target, second, iso ? "iso" : sse ? "sse" : equiv ? "equiv" : "all",
                  budget);
    } else if (cmd == hsip) {
      o = cmd_hsip(ws, target, second, budget);
    } else if (cmd == builtin) {
      o = cmd_builtin(list, dump);
    }
    if (o.code == kInputError) status = "error";
  } catch (const InputError& e) {
    o = Outcome{kInputError, "", nullptr};
    diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
    status = "error";
  } catch (const BudgetExhausted& e) {
    o = Outcome{kBudgetExhausted, "", nullptr};
    diags.push_back({e.what(), std::nullopt});
    status = "budget-exhausted";
  }

  if (json_mode) {
    json envelope = {{"schema", kSchemaVersion},
                     {"status", status},
                     {"command", args},
                     {"exit_code", o.code},
                     {"result", o.result},
                     {"diagnostics", diagnostics_json(diags)}};
    out << envelope.dump(2) << "\n";
  } else {
    out << o.text;
    for (const auto& d : diags) err << "error: " << d.to_string() << "\n";
  }
  return o.code;
}

}  // namespace folds::cli

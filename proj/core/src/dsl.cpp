#include "foldskit/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace folds {

namespace {

const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {
      "signature", "sort", "rank",  "eq",     "height", "structure", "over",
      "theory",    "axiom", "forall", "exists", "not",    "true",      "false"};
  return words;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool is_natural(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

enum class Tok { ident, nat, string, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;
  std::size_t length = 1;
};

class Lexer {
 public:
  Lexer(const std::string& text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip();
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    Token end;
    end.kind = Tok::end;
    end.text = "end of input";
    locate_end(end);
    out.push_back(end);
    return out;
  }

  SourceSpan span(const Token& t) const { return {file_, t.line, t.column, t.length}; }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t line, std::size_t col,
                         std::size_t len) const {
    throw InputError(msg, SourceSpan{file_, line, col, std::max<std::size_t>(len, 1)});
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  void locate_end(Token& t) const {
    // Point at the last non-blank byte so the span stays inside the text.
    std::size_t last = text_.find_last_not_of(" \t\r\n");
    if (last == std::string::npos) last = text_.empty() ? 0 : text_.size() - 1;
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < last && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    t.line = line;
    t.column = col;
    t.offset = last;
    t.length = 1;
  }

  Token next() {
    Token t;
    t.line = line_;
    t.column = col_;
    t.offset = pos_;
    char c = text_[pos_];
    auto take = [&](std::size_t n) {
      t.text = text_.substr(pos_, n);
      for (std::size_t i = 0; i < n; ++i) advance();
      t.length = n;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
        ++end;
      }
      t.kind = Tok::ident;
      take(end - pos_);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      if (end < text_.size() &&
          (std::isalpha(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
        fail("identifiers may not start with a digit", line_, col_, end - pos_ + 1);
      }
      t.kind = Tok::nat;
      take(end - pos_);
    } else if (c == '"') {
      t.kind = Tok::string;
      std::size_t start_line = line_, start_col = col_, start = pos_;
      advance();
      std::string value;
      while (true) {
        if (pos_ >= text_.size() || text_[pos_] == '\n') {
          fail("unterminated string", start_line, start_col, pos_ - start);
        }
        char d = text_[pos_];
        if (d == '"') {
          advance();
          break;
        }
        if (d == '\\') {
          advance();
          if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\\')) {
            fail("unknown escape in string", line_, col_ - 1, 2);
          }
          d = text_[pos_];
        }
        value += d;
        advance();
      }
      t.text = value;
      t.length = pos_ - start;
      if (value.empty()) fail("empty quoted name", start_line, start_col, t.length);
    } else {
      static const char* multi[] = {"<->", "==", "->", "/\\", "\\/"};
      for (const char* m : multi) {
        std::string s(m);
        if (text_.compare(pos_, s.size(), s) == 0) {
          t.kind = Tok::punct;
          take(s.size());
          return t;
        }
      }
      if (std::string("{}(),:=.;").find(c) != std::string::npos) {
        t.kind = Tok::punct;
        take(1);
      } else {
        std::size_t len = 1;
        auto u = static_cast<unsigned char>(c);
        if (u >= 0xC0) len = u >= 0xF0 ? 4 : u >= 0xE0 ? 3 : 2;
        len = std::min(len, text_.size() - pos_);
        fail("unexpected character '" + text_.substr(pos_, len) + "'", line_, col_, len);
      }
    }
    return t;
  }

  const std::string& text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& text, const std::string& file)
      : text_(text), lexer_(text, file), tokens_(lexer_.run()) {}

  DslHeader header() {
    DslHeader h;
    const Token& t = peek();
    if (is_keyword(t, "signature")) {
      h.kind = DslHeader::Kind::signature;
      ++i_;
      h.name = name("signature name");
    } else if (is_keyword(t, "structure") || is_keyword(t, "theory")) {
      h.kind = t.text == "structure" ? DslHeader::Kind::structure : DslHeader::Kind::theory;
      ++i_;
      h.name = name(t.text + " name");
      keyword("over");
      h.over = name("signature name");
    } else {
      fail(t, "expected 'signature', 'structure' or 'theory'");
    }
    return h;
  }

  SignatureDecl signature() {
    auto h = header();
    if (h.kind != DslHeader::Kind::signature) fail(tokens_[0], "expected a signature");
    SignatureDecl d;
    d.name = h.name;
    punct("{");
    while (!at_punct("}")) {
      const Token& t = peek();
      if (is_keyword(t, "sort")) {
        d.sorts.push_back(sort_decl());
      } else if (is_keyword(t, "eq")) {
        d.equations.push_back(equation());
      } else if (is_keyword(t, "height")) {
        ++i_;
        if (d.height) fail(t, "height given twice");
        d.height = natural("height");
      } else {
        fail(t, "expected 'sort', 'eq', 'height' or '}'");
      }
    }
    punct("}");
    end();
    return d;
  }

  StructureDecl structure() {
    auto h = header();
    if (h.kind != DslHeader::Kind::structure) fail(tokens_[0], "expected a structure");
    StructureDecl d{h.name, h.over, {}};
    punct("{");
    while (!at_punct("}")) {
      CarrierDecl c;
      const Token& st = peek();
      c.sort = name("sort name");
      c.span = span(st);
      punct("=");
      punct("{");
      while (!at_punct("}")) {
        c.elements.push_back(element());
        if (!at_punct("}")) punct(",");
      }
      punct("}");
      if (at_punct(";")) ++i_;
      d.carriers.push_back(std::move(c));
    }
    punct("}");
    end();
    return d;
  }

  TheoryDecl theory() {
    auto h = header();
    if (h.kind != DslHeader::Kind::theory) fail(tokens_[0], "expected a theory");
    TheoryDecl d{h.name, h.over, {}};
    punct("{");
    while (!at_punct("}")) {
      const Token& t = peek();
      if (!is_keyword(t, "axiom")) fail(t, "expected 'axiom' or '}'");
      ++i_;
      const Token& nt = peek();
      std::string n = name("axiom name");
      punct(":");
      d.axioms.push_back({n, formula(), span(nt)});
    }
    punct("}");
    end();
    return d;
  }

  FormulaPtr lone_formula() {
    auto f = formula();
    end();
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(i_ + ahead, tokens_.size() - 1)];
  }

  SourceSpan span(const Token& t) const { return lexer_.span(t); }

  /// Span from `first` through the previous token when they share a line.
  SourceSpan span_from(const Token& first) const {
    const Token& last = tokens_[i_ > 0 ? i_ - 1 : 0];
    SourceSpan s = span(first);
    if (last.line == first.line && last.offset >= first.offset) {
      s.length = last.offset + last.length - first.offset;
    }
    return s;
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    std::string got = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw InputError(msg + ", found " + got, span(t));
  }

  bool is_keyword(const Token& t, const char* word) const {
    return t.kind == Tok::ident && t.text == word;
  }
  bool at_punct(const char* p) const { return peek().kind == Tok::punct && peek().text == p; }

  void keyword(const char* word) {
    if (!is_keyword(peek(), word)) fail(peek(), std::string("expected '") + word + "'");
    ++i_;
  }
  void punct(const char* p) {
    if (!at_punct(p)) fail(peek(), std::string("expected '") + p + "'");
    ++i_;
  }
  void end() {
    if (peek().kind != Tok::end) fail(peek(), "expected end of input");
  }

  bool at_name() const {
    const Token& t = peek();
    return t.kind == Tok::string || (t.kind == Tok::ident && !reserved().count(t.text));
  }

  std::string name(const std::string& what) {
    if (!at_name()) fail(peek(), "expected " + what);
    return tokens_[i_++].text;
  }

  std::string element_name() {
    if (peek().kind == Tok::nat) return tokens_[i_++].text;
    return name("element name");
  }

  std::size_t natural(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::nat) fail(t, "expected a natural number for " + what);
    ++i_;
    if (t.text.size() > 9) fail(t, what + " is too large");
    return std::stoul(t.text);
  }

  SortDecl sort_decl() {
    const Token& start = peek();
    keyword("sort");
    SortDecl s;
    s.id = name("sort name");
    keyword("rank");
    s.rank = natural("rank");
    s.span = span(start);
    if (at_punct("{")) {
      ++i_;
      while (!at_punct("}")) {
        const Token& gt = peek();
        GeneratorDecl g;
        g.label = name("generator label");
        punct(":");
        g.target = name("target sort");
        g.span = span_from(gt);
        s.generators.push_back(std::move(g));
        if (!at_punct("}")) punct(",");
      }
      punct("}");
    }
    return s;
  }

  std::vector<std::string> path() {
    std::vector<std::string> labels{name("generator label")};
    while (at_punct(".")) {
      ++i_;
      labels.push_back(name("generator label"));
    }
    return labels;
  }

  PathEquation equation() {
    const Token& start = peek();
    keyword("eq");
    PathEquation e;
    std::string first = name("sort or generator label");
    if (at_punct(":")) {
      ++i_;
      e.source = first;
      e.lhs = path();
    } else {
      e.lhs = {first};
      while (at_punct(".")) {
        ++i_;
        e.lhs.push_back(name("generator label"));
      }
    }
    punct("=");
    e.rhs = path();
    e.span = span_from(start);
    return e;
  }

  ElementDecl element() {
    const Token& start = peek();
    ElementDecl e;
    e.name = element_name();
    e.span = span(start);
    if (at_punct("(")) {
      ++i_;
      while (!at_punct(")")) {
        std::string label = name("generator label");
        punct("=");
        e.images.emplace_back(label, element_name());
        if (!at_punct(")")) punct(",");
      }
      punct(")");
    }
    return e;
  }

  std::vector<Binding> bindings() {
    std::vector<Binding> out;
    punct("(");
    while (!at_punct(")")) {
      Binding b;
      b.label = name("generator label");
      punct("=");
      b.var = name("variable");
      out.push_back(std::move(b));
      if (!at_punct(")")) punct(",");
    }
    punct(")");
    return out;
  }

  static FormulaPtr located(FormulaPtr f, SourceSpan s) {
    auto copy = std::make_shared<Formula>(*f);
    copy->span = std::move(s);
    return copy;
  }

  FormulaPtr formula() {
    const Token& start = peek();
    auto lhs = implication();
    while (at_punct("<->")) {
      ++i_;
      lhs = located(Formula::binary(Formula::Kind::Iff, lhs, implication()), span(start));
    }
    return lhs;
  }

  FormulaPtr implication() {
    const Token& start = peek();
    auto lhs = disjunction();
    if (at_punct("->")) {
      ++i_;
      return located(Formula::binary(Formula::Kind::Implies, lhs, implication()), span(start));
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    const Token& start = peek();
    auto lhs = conjunction();
    while (at_punct("\\/")) {
      ++i_;
      lhs = located(Formula::binary(Formula::Kind::Or, lhs, conjunction()), span(start));
    }
    return lhs;
  }

  FormulaPtr conjunction() {
    const Token& start = peek();
    auto lhs = unary();
    while (at_punct("/\\")) {
      ++i_;
      lhs = located(Formula::binary(Formula::Kind::And, lhs, unary()), span(start));
    }
    return lhs;
  }

  FormulaPtr unary() {
    const Token& t = peek();
    if (is_keyword(t, "not")) {
      ++i_;
      return located(Formula::negate(unary()), span(t));
    }
    if (is_keyword(t, "forall") || is_keyword(t, "exists")) return quantifier();
    return primary();
  }

  FormulaPtr quantifier() {
    const Token& t = peek();
    auto kind = t.text == "forall" ? Formula::Kind::Forall : Formula::Kind::Exists;
    ++i_;
    std::vector<std::pair<std::string, SourceSpan>> vars;
    do {
      const Token& vt = peek();
      vars.emplace_back(name("variable"), span(vt));
    } while (at_name());
    punct(":");
    const Token& st = peek();
    std::string sort = name("sort name");
    std::vector<Binding> binds;
    if (at_punct("(")) binds = bindings();
    SourceSpan decl_span = span_from(st);
    punct(",");
    auto body = formula();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      body = located(Formula::quantifier(kind, it->first, sort, binds, body), decl_span);
    }
    return body;
  }

  FormulaPtr primary() {
    const Token& t = peek();
    if (is_keyword(t, "true") || is_keyword(t, "false")) {
      ++i_;
      return located(Formula::truth(t.text == "true"), span(t));
    }
    if (at_punct("(")) {
      ++i_;
      auto f = formula();
      punct(")");
      return f;
    }
    if (!at_name()) fail(t, "expected a formula");
    std::string first = name("name");
    if (at_punct("(")) {
      auto binds = bindings();
      return located(Formula::inhabited(first, std::move(binds)), span_from(t));
    }
    if (at_punct("==")) {
      ++i_;
      std::string rhs = name("variable");
      return located(Formula::equal(first, rhs), span_from(t));
    }
    fail(peek(), "expected '(' or '==' after '" + first + "'");
  }

  const std::string& text_;
  Lexer lexer_;
  std::vector<Token> tokens_;
  std::size_t i_ = 0;
};

void check_over(const std::string& kind, const std::string& name, const std::string& over,
                const Signature& sig) {
  if (over != sig.name()) {
    throw InputError(kind + " '" + name + "' is over '" + over + "' but signature '" + sig.name() +
                     "' was supplied");
  }
}

int precedence(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: return 0;
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Not: return 5;
    default: return 6;
  }
}

std::string format_bindings(const std::vector<Binding>& binds) {
  std::string s = "(";
  for (std::size_t i = 0; i < binds.size(); ++i) {
    if (i) s += ", ";
    s += format_name(binds[i].label) + "=" + format_name(binds[i].var);
  }
  return s + ")";
}

void print(const Formula& f, int need, std::string& out) {
  using K = Formula::Kind;
  int mine = precedence(f);
  bool wrap = mine < need || (mine == 0 && need > 0);
  if (wrap) out += "(";
  switch (f.kind) {
    case K::True: out += "true"; break;
    case K::False: out += "false"; break;
    case K::Not:
      out += "not ";
      print(*f.args[0], 5, out);
      break;
    case K::And:
      print(*f.args[0], 4, out);
      out += " /\\ ";
      print(*f.args[1], 5, out);
      break;
    case K::Or:
      print(*f.args[0], 3, out);
      out += " \\/ ";
      print(*f.args[1], 4, out);
      break;
    case K::Implies:
      print(*f.args[0], 3, out);
      out += " -> ";
      print(*f.args[1], 2, out);
      break;
    case K::Iff:
      print(*f.args[0], 1, out);
      out += " <-> ";
      print(*f.args[1], 2, out);
      break;
    case K::Forall:
    case K::Exists: {
      out += f.kind == K::Forall ? "forall" : "exists";
      const Formula* cur = &f;
      out += " " + format_name(cur->var);
      while (true) {
        const Formula& body = *cur->args[0];
        if (body.kind != f.kind || body.sort != f.sort || body.bindings != f.bindings) break;
        cur = &body;
        out += " " + format_name(cur->var);
      }
      out += " : " + format_name(f.sort);
      if (!f.bindings.empty()) out += format_bindings(f.bindings);
      out += ", ";
      print(*cur->args[0], 0, out);
      break;
    }
    case K::Inhabited:
      out += format_name(f.sort) + format_bindings(f.bindings);
      break;
    case K::Equal:
      out += format_name(f.lhs) + " == " + format_name(f.rhs);
      break;
  }
  if (wrap) out += ")";
}

std::string format_element(const std::string& e) {
  return is_natural(e) ? e : format_name(e);
}

}  // namespace

std::string format_name(const std::string& name) {
  if (is_identifier(name) && !reserved().count(name)) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

DslHeader parse_header(const std::string& text, const std::string& file) {
  return Parser(text, file).header();
}

SignatureDecl parse_signature_decl(const std::string& text, const std::string& file) {
  return Parser(text, file).signature();
}

Signature parse_signature(const std::string& text, const std::string& file) {
  return Signature::from_decl(parse_signature_decl(text, file));
}

StructureDecl parse_structure_decl(const std::string& text, const std::string& file) {
  return Parser(text, file).structure();
}

Structure parse_structure(const std::string& text, SignaturePtr sig, const std::string& file) {
  auto d = parse_structure_decl(text, file);
  check_over("structure", d.name, d.signature, *sig);
  return Structure::from_decl(std::move(sig), d);
}

TheoryDecl parse_theory_decl(const std::string& text, const std::string& file) {
  return Parser(text, file).theory();
}

Theory parse_theory(const std::string& text, SignaturePtr sig, const std::string& file) {
  auto d = parse_theory_decl(text, file);
  check_over("theory", d.name, d.signature, *sig);
  std::vector<std::pair<std::string, FormulaPtr>> axioms;
  for (auto& a : d.axioms) {
    for (const auto& [n, f] : axioms) {
      if (n == a.name) throw InputError("duplicate axiom '" + a.name + "'", a.span);
    }
    axioms.emplace_back(a.name, a.formula);
  }
  return Theory::make(d.name, std::move(sig), std::move(axioms));
}

FormulaPtr parse_formula(const std::string& text, const std::string& file) {
  return Parser(text, file).lone_formula();
}

std::string format_formula(const Formula& f) {
  std::string out;
  print(f, 0, out);
  return out;
}

std::string serialize(const Signature& sig) {
  auto d = sig.decl();
  std::ostringstream os;
  os << "signature " << format_name(d.name) << " {\n";
  if (d.height) os << "  height " << *d.height << "\n";
  for (const auto& s : d.sorts) {
    os << "  sort " << format_name(s.id) << " rank " << s.rank;
    if (!s.generators.empty()) {
      os << " { ";
      for (std::size_t i = 0; i < s.generators.size(); ++i) {
        os << (i ? ", " : "") << format_name(s.generators[i].label) << ": "
           << format_name(s.generators[i].target);
      }
      os << " }";
    }
    os << "\n";
  }
  auto path = [](const std::vector<std::string>& labels) {
    std::string p;
    for (std::size_t i = 0; i < labels.size(); ++i) p += (i ? "." : "") + format_name(labels[i]);
    return p;
  };
  for (const auto& e : d.equations) {
    os << "  eq " << format_name(e.source) << ": " << path(e.lhs) << " = " << path(e.rhs) << "\n";
  }
  os << "}\n";
  return os.str();
}

std::string serialize(const Structure& m) {
  auto d = m.decl();
  std::ostringstream os;
  os << "structure " << format_name(d.name) << " over " << format_name(d.signature) << " {\n";
  for (const auto& c : d.carriers) {
    bool bare = std::all_of(c.elements.begin(), c.elements.end(),
                            [](const ElementDecl& e) { return e.images.empty(); });
    os << "  " << format_name(c.sort) << " = {";
    if (bare) {
      for (std::size_t i = 0; i < c.elements.size(); ++i) {
        os << (i ? ", " : " ") << format_element(c.elements[i].name);
      }
      os << " }\n";
      continue;
    }
    os << "\n";
    for (std::size_t i = 0; i < c.elements.size(); ++i) {
      const auto& e = c.elements[i];
      os << "    " << format_element(e.name) << " (";
      for (std::size_t j = 0; j < e.images.size(); ++j) {
        os << (j ? ", " : "") << format_name(e.images[j].first) << "="
           << format_element(e.images[j].second);
      }
      os << ")" << (i + 1 < c.elements.size() ? "," : "") << "\n";
    }
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

std::string serialize(const Theory& t) {
  std::ostringstream os;
  os << "theory " << format_name(t.name) << " over " << format_name(t.sig->name()) << " {\n";
  for (const auto& a : t.axioms) {
    os << "  axiom " << format_name(a.name) << ":\n    " << format_formula(*a.formula) << "\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace folds

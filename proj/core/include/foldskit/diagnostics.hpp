#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace folds {

/// Location of a token in DSL input. Lines and columns are 1-based.
struct SourceSpan {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t length = 0;

  bool valid() const { return line > 0 && column > 0 && length > 0; }
  bool operator==(const SourceSpan&) const = default;
};

struct Diagnostic {
  std::string message;
  std::optional<SourceSpan> span;

  std::string to_string() const;
};

/// Collected violations; an empty report means the input passed every check.
struct ValidationReport {
  std::vector<Diagnostic> entries;

  bool ok() const { return entries.empty(); }
  void add(std::string message, std::optional<SourceSpan> span = std::nullopt) {
    entries.push_back({std::move(message), std::move(span)});
  }
  void append(const ValidationReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  }
  std::string to_string() const;
};

/// Malformed input: parse errors, dangling references, ill-typed data.
class InputError : public std::runtime_error {
 public:
  explicit InputError(std::vector<Diagnostic> diagnostics);
  explicit InputError(const std::string& message, std::optional<SourceSpan> span = std::nullopt);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Raised when a search exceeds its node budget. Never a partial answer.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(std::string what, std::uint64_t budget);
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t budget_;
};

/// Default search-node budget shared by every enumeration.
inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

/// Counts search nodes and throws BudgetExhausted once the cap is passed.
class NodeBudget {
 public:
  explicit NodeBudget(std::uint64_t cap = kDefaultBudget, std::string what = "search")
      : cap_(cap), what_(std::move(what)) {}

  void tick() {
    if (++used_ > cap_) throw BudgetExhausted(what_, cap_);
  }
  std::uint64_t used() const { return used_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t cap_;
  std::uint64_t used_ = 0;
  std::string what_;
};

}  // namespace folds

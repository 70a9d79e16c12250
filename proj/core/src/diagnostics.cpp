#include "foldskit/diagnostics.hpp"

#include <sstream>

namespace folds {

std::string Diagnostic::to_string() const {
  std::ostringstream out;
  if (span && span->valid()) {
    if (!span->file.empty()) out << span->file << ':';
    out << span->line << ':' << span->column << ": ";
  }
  out << message;
  return out.str();
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& d : entries) out << d.to_string() << '\n';
  return out.str();
}

namespace {
std::string join_messages(const std::vector<Diagnostic>& diagnostics) {
  if (diagnostics.empty()) return "invalid input";
  std::string text = diagnostics.front().to_string();
  if (diagnostics.size() > 1) {
    text += " (+" + std::to_string(diagnostics.size() - 1) + " more)";
  }
  return text;
}
}  // namespace

InputError::InputError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

InputError::InputError(const std::string& message, std::optional<SourceSpan> span)
    : InputError(std::vector<Diagnostic>{{message, std::move(span)}}) {}

BudgetExhausted::BudgetExhausted(std::string what, std::uint64_t budget)
    : std::runtime_error("budget exhausted: " + what + " exceeded " + std::to_string(budget) +
                         " search nodes"),
      budget_(budget) {}

}  // namespace folds

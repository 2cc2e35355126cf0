#include "entcap/errors.hpp"

namespace entcap {

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    if (!out.empty()) out += "; ";
    out += d.path.empty() ? d.message : d.path + ": " + d.message;
  }
  return out;
}

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(format_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

ValidationError::ValidationError(std::string path, std::string message)
    : ValidationError(std::vector<Diagnostic>{{std::move(path), std::move(message)}}) {}

}  // namespace entcap

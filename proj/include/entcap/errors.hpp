#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace entcap {

struct Diagnostic {
  std::string path;     // field path, e.g. "links[3].p"
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: topology documents, assignment files, state specs.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);
  ValidationError(std::string path, std::string message);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// A configured size limit (state-space budget, oracle instance cap) was hit.
class GuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace entcap

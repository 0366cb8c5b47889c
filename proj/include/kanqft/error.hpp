#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kanqft {

// Errors carry a module prefix, e.g. "fincat: missing cartesian lift for (S', f)".
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}

  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

// A validation failure with every offending entry listed.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& module, std::vector<std::string> issues)
      : Error(module, join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace kanqft

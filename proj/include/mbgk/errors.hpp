#pragma once

#include <stdexcept>
#include <string>

namespace mbgk {

// Error categories reported by the CLI as machine-readable tags.
enum class ErrorCategory {
  domain,           // invalid physical input (negative temperature, ...)
  contract,         // precondition between modules violated
  invariant,        // a provable property failed at runtime (implementation bug)
  config_parse,     // config file could not be parsed
  config_validate,  // config parsed but semantically invalid
  io,               // file system failure
  numeric,          // solver failure (non-convergence, singular system)
};

const char* to_string(ErrorCategory c);

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

private:
  ErrorCategory category_;
};

[[noreturn]] inline void throw_domain(const std::string& msg) {
  throw Error(ErrorCategory::domain, msg);
}
[[noreturn]] inline void throw_contract(const std::string& msg) {
  throw Error(ErrorCategory::contract, msg);
}
[[noreturn]] inline void throw_invariant(const std::string& msg) {
  throw Error(ErrorCategory::invariant, msg);
}

}  // namespace mbgk

#include "mbgk/errors.hpp"

namespace mbgk {

const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::contract: return "contract";
    case ErrorCategory::invariant: return "invariant";
    case ErrorCategory::config_parse: return "config-parse";
    case ErrorCategory::config_validate: return "config-validate";
    case ErrorCategory::io: return "io";
    case ErrorCategory::numeric: return "numeric";
  }
  return "unknown";
}

}  // namespace mbgk

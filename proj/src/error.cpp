#include "idrl/error.hpp"

namespace idrl {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameters: return "invalid-parameters";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_configuration: return "invalid-configuration";
    case ErrorKind::degenerate_query: return "degenerate-query";
    case ErrorKind::numerical_failure: return "numerical-failure";
    case ErrorKind::unsupported_query_kind: return "unsupported-query-kind";
    case ErrorKind::insufficient_candidates: return "insufficient-candidates";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::conflict: return "conflict";
  }
  return "unknown";
}

}  // namespace idrl

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace idrl {

enum class ErrorKind {
  invalid_parameters,
  invalid_input,
  invalid_configuration,
  degenerate_query,
  numerical_failure,
  unsupported_query_kind,
  insufficient_candidates,
  not_found,
  conflict,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library. `kind()` classifies the failure so
/// callers (CLI, HTTP layer) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Name of the offending config field, if the error came from validation.
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message, std::string field = {}) {
  throw Error(kind, message, std::move(field));
}

}  // namespace idrl

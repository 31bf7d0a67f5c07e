#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sector_lab {

enum class ErrorCode {
  invalid_parameter,
  not_connected,
  disconnected_configuration_space,
  backend_unavailable,
  possibly_infinite_group,
  invalid_representation,
  invalid_region,
  convergence_failure,
  unsupported_group,
  decomposition_failure,
  numerical_failure,
  truncation_too_small,
  parse_error,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::not_connected: return "not-connected";
    case ErrorCode::disconnected_configuration_space: return "disconnected-configuration-space";
    case ErrorCode::backend_unavailable: return "backend-unavailable";
    case ErrorCode::possibly_infinite_group: return "possibly-infinite-group";
    case ErrorCode::invalid_representation: return "invalid-representation";
    case ErrorCode::invalid_region: return "invalid-region";
    case ErrorCode::convergence_failure: return "convergence-failure";
    case ErrorCode::unsupported_group: return "unsupported-group";
    case ErrorCode::decomposition_failure: return "decomposition-failure";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::truncation_too_small: return "truncation-too-small";
    case ErrorCode::parse_error: return "parse-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace sector_lab

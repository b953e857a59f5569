#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posvcg {

enum class ErrorCode {
  InvalidCurve,
  UnknownAlternative,
  AlternativeMismatch,
  InvalidSpec,
  TypeNotPosRepresentable,
  TypeNotRepresentable,
  ZeroWeightAgent,
  EmptyGrid,
  BudgetExceeded,
  IncompleteTable,
  TooManyVariables,
  EmptyTable,
  ParseError,
};

/// Stable snake_case identifier used in machine-readable error reports.
inline std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidCurve: return "invalid_curve";
    case ErrorCode::UnknownAlternative: return "unknown_alternative";
    case ErrorCode::AlternativeMismatch: return "alternative_mismatch";
    case ErrorCode::InvalidSpec: return "invalid_spec";
    case ErrorCode::TypeNotPosRepresentable: return "type_not_pos_representable";
    case ErrorCode::TypeNotRepresentable: return "type_not_representable";
    case ErrorCode::ZeroWeightAgent: return "zero_weight_agent";
    case ErrorCode::EmptyGrid: return "empty_grid";
    case ErrorCode::BudgetExceeded: return "budget_exceeded";
    case ErrorCode::IncompleteTable: return "incomplete_table";
    case ErrorCode::TooManyVariables: return "too_many_variables";
    case ErrorCode::EmptyTable: return "empty_table";
    case ErrorCode::ParseError: return "parse_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the mechanism when a reported type lacks the required
/// quasi-linear (pos-)representation; carries the offending agent.
class TypeError : public Error {
 public:
  TypeError(ErrorCode code, const std::string& message, std::size_t agent,
            std::size_t type_index = 0)
      : Error(code, message), agent_(agent), type_index_(type_index) {}

  std::size_t agent() const noexcept { return agent_; }
  std::size_t type_index() const noexcept { return type_index_; }

 private:
  std::size_t agent_;
  std::size_t type_index_;
};

}  // namespace posvcg

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msq {

enum class ErrorKind {
  invalid_order,
  malformed_square,
  unsupported_order,
  unsupported_family,
  malformed_pattern,
  mixed_order,
  partial_result,
  invalid_matrix,
  no_convergence,
  insufficient_data,
  degenerate_labels,
  degenerate_distribution,
  parse,
  integrity,
  io,
  format_mismatch,
  render_spec,
  usage,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_order: return "invalid-order";
    case ErrorKind::malformed_square: return "malformed-square";
    case ErrorKind::unsupported_order: return "unsupported-order";
    case ErrorKind::unsupported_family: return "unsupported-family";
    case ErrorKind::malformed_pattern: return "malformed-pattern";
    case ErrorKind::mixed_order: return "mixed-order";
    case ErrorKind::partial_result: return "partial-result";
    case ErrorKind::invalid_matrix: return "invalid-matrix";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::degenerate_labels: return "degenerate-labels";
    case ErrorKind::degenerate_distribution: return "degenerate-distribution";
    case ErrorKind::parse: return "parse";
    case ErrorKind::integrity: return "integrity";
    case ErrorKind::io: return "io";
    case ErrorKind::format_mismatch: return "format-mismatch";
    case ErrorKind::render_spec: return "render-spec";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace msq

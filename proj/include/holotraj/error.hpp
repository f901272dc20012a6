#pragma once

#include <stdexcept>
#include <string>

namespace holotraj {

enum class ErrKind {
  invalid_dimension,
  dimension_mismatch,
  empty_input,
  non_unitary_base,
  invalid_exponent,
  malformed_snapshot,
  unsupported_probe,
  schema,
  validation,
  label_unavailable,
  split,
  config,
  no_data,
  insufficient_history,
  training_diverged,
  numeric_overflow,
  io,
};

class Error : public std::runtime_error {
public:
  Error(ErrKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrKind kind() const { return kind_; }

  // Process exit code convention: 1 = input/validation problem, 2 = runtime failure.
  int exit_code() const {
    switch (kind_) {
      case ErrKind::io:
      case ErrKind::training_diverged:
      case ErrKind::numeric_overflow:
        return 2;
      default:
        return 1;
    }
  }

private:
  ErrKind kind_;
};

}  // namespace holotraj

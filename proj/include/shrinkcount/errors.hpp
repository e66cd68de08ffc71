#pragma once

#include <stdexcept>
#include <string>

namespace shrinkcount {

// Structural violation in a dataset or in values read from a file
// (count out of range, inconsistent trial count, empty variable).
struct ConstraintError : std::runtime_error {
  explicit ConstraintError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; `line` is 1-based, 0 when not attributable.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, long line_number)
      : std::runtime_error(line_number > 0
                               ? msg + " (line " + std::to_string(line_number) + ")"
                               : msg),
        line(line_number) {}
  long line;
};

// Penalty applied to a model family it is not defined for.
struct FamilyMismatchError : std::invalid_argument {
  explicit FamilyMismatchError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Operation asked for a (penalty, backend) combination that does not exist,
// e.g. a closed-form solution for a penalty that has none.
struct UnsupportedPenaltyError : std::invalid_argument {
  explicit UnsupportedPenaltyError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Fold count incompatible with the dataset.
struct InvalidVError : std::invalid_argument {
  explicit InvalidVError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Simulation config rejected; message lists every problem found, one per line.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace shrinkcount

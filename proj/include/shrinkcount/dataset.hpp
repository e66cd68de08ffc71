#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace shrinkcount {

// One bounded-count variable: observations x_j with 0 <= x_j <= trials.
struct VariableData {
  std::string id;
  int trials = 0;           // N, common upper bound for this variable's counts
  std::vector<int> counts;  // one entry per observation
};

// A collection of independent bounded-count variables. Immutable by
// convention once built; nothing here mutates after construction.
struct CountDataset {
  std::vector<VariableData> variables;

  std::size_t size() const { return variables.size(); }

  // Throws ConstraintError unless: at least one variable, every variable has
  // trials >= 1 and at least one observation, and every count is in [0, trials].
  void validate() const;
};

}  // namespace shrinkcount

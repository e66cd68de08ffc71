#include "shrinkcount/dataset.hpp"

#include "shrinkcount/errors.hpp"

namespace shrinkcount {

void CountDataset::validate() const {
  if (variables.empty()) throw ConstraintError("dataset has no variables");
  for (const auto& v : variables) {
    if (v.trials < 1)
      throw ConstraintError("variable '" + v.id + "': trials must be >= 1");
    if (v.counts.empty())
      throw ConstraintError("variable '" + v.id + "': needs at least one observation");
    for (int x : v.counts) {
      if (x < 0 || x > v.trials)
        throw ConstraintError("variable '" + v.id + "': count " + std::to_string(x) +
                              " outside [0, " + std::to_string(v.trials) + "]");
    }
  }
}

}  // namespace shrinkcount

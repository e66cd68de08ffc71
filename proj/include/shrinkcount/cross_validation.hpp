#pragma once

#include <cstdint>
#include <vector>

#include "shrinkcount/count_models.hpp"
#include "shrinkcount/dataset.hpp"
#include "shrinkcount/estimator.hpp"
#include "shrinkcount/penalties.hpp"

namespace shrinkcount {

// Per-variable assignment of each observation to one of V folds.
struct FoldPlan {
  int folds = 0;  // V
  // assignments[i][j] = fold of observation j of variable i, in [0, V).
  std::vector<std::vector<int>> assignments;
  std::uint64_t seed = 0;

  // Throws unless every variable's assignment partitions its observations
  // with fold sizes differing by at most one.
  void validate(const CountDataset& data) const;
};

// Seeded per-variable shuffle dealt round-robin into V folds, so fold sizes
// differ by at most one. Requires 2 <= V <= min_i n_i. Identical
// (dataset shape, V, seed) give identical plans.
FoldPlan make_folds(const CountDataset& data, int folds, std::uint64_t seed);

// Ascending coefficients with values[0] == 0.
struct LambdaGrid {
  std::vector<double> values;
  void validate() const;  // strictly increasing, first element exactly 0
};

// 63 values: 0, then 62 points log-equidistant from 1e-2 to 1e4 inclusive.
LambdaGrid default_lambda_grid();

struct CVResult {
  LambdaGrid grid;
  std::vector<double> scores;       // summed held-out negative log-likelihood per lambda
  std::vector<bool> score_flags;    // some fold fit did not converge / score not finite
  double lambda_opt = 0.0;
  PenaltySpec penalty;
  ModelParams final_params;         // full-data refit at lambda_opt * mean(n_i)
  FitResult final_fit;              // full refit diagnostics (objective, convergence)
  double n_bar = 0.0;               // mean(n_i) used for the final coefficient
};

// V-fold cross-validation. For fold v the training objective is
//   -log_likelihood(train) + lambda_m * nbar_v * Pen,  nbar_v = mean train size,
// fits warm-started up the grid; the score of lambda_m is the sum over folds
// of the held-out negative log-likelihood (lower is better). Ties within
// 1e-9 of the minimum go to the smallest lambda. The returned params come
// from one more fit on the full data with coefficient lambda_opt * mean(n_i).
// `threads` parallelizes over folds; results do not depend on it.
CVResult vfcv(ModelFamily family, const PenaltySpec& penalty, const LambdaGrid& grid,
              const CountDataset& data, const FoldPlan& folds, int threads = 1);

// Runs vfcv for each penalty with the same fold plan and returns the result
// whose best score is smallest (first listed wins ties).
CVResult min_cv_select(ModelFamily family, const std::vector<PenaltySpec>& penalties,
                       const LambdaGrid& grid, const CountDataset& data,
                       const FoldPlan& folds, int threads = 1);

}  // namespace shrinkcount

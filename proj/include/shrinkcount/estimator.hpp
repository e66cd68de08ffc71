#pragma once

#include <optional>
#include <vector>

#include "shrinkcount/count_models.hpp"
#include "shrinkcount/dataset.hpp"
#include "shrinkcount/penalties.hpp"

namespace shrinkcount {

// A penalized fit problem: minimize -log_likelihood + lambda * penalty.
// `lambda` is the coefficient that actually multiplies the penalty; callers
// that want sample-size scaling (cross-validation) apply it before calling.
struct FitRequest {
  ModelFamily family = ModelFamily::Binomial;
  PenaltySpec penalty;
  double lambda = 0.0;
  CountDataset data;
  std::optional<ModelParams> init;
  // Permit the exact binomial solutions for L1Zero / LogBarrier / LogGreedy /
  // Kappa instead of the numeric optimizer. Oracle tests set this to false to
  // force the two routes to be compared.
  bool allow_closed_form = true;
};

struct FitResult {
  ModelParams params;
  double objective = 0.0;  // penalized_objective at params
  bool converged = false;
  int iterations = 0;
  // Per variable: some parameter ended on the optimization box
  // (p at 1e-12 or 1-1e-12, alpha/beta at 1e-8 or 1e8).
  std::vector<bool> boundary_flags;
};

// -log_likelihood(params, data) + lambda * penalty_value(spec, params).
// When the likelihood is exactly zero the objective is +inf regardless of
// the penalty value.
double penalized_objective(ModelFamily family, const PenaltySpec& penalty, double lambda,
                           const ModelParams& params, const CountDataset& data);

// Exact coordinate-wise solutions for the binomial family. Observations are
// aggregated per variable (x_i = sum of counts, N_i = n_i * trials), which
// preserves the likelihood. Supported kinds and their solutions, writing
// l_i = lambda / N_i and phat_i = x_i / N_i:
//   L1Zero      ((l_i+1)/(2 l_i)) [1 - sqrt(1 - 4 l_i phat_i / (l_i+1)^2)]
//   LogBarrier  N_i / (N_i + lambda) * phat_i
//   LogGreedy   (x_i - lambda) / (N_i - lambda) for lambda < x_i, else 0
//   Kappa       N_i/(N_i+lambda) * phat_i + lambda/(N_i+lambda) * kappa
// Throws UnsupportedPenaltyError for any other kind.
std::vector<double> closed_form_binomial(const PenaltySpec& penalty,
                                         const CountDataset& data, double lambda);

// Minimizes the penalized objective. Probabilities are optimized on the
// logit scale and alpha/beta on the log scale with analytic gradients:
// box constraints vanish and the clamps above become the search box.
// Separable penalties are fit one variable at a time. Non-convergence is
// reported through converged=false on the best iterate, not an exception.
FitResult fit_penalized(const FitRequest& req);

// Same fit without copying the dataset into a request.
FitResult fit_penalized(ModelFamily family, const PenaltySpec& penalty, double lambda,
                        const CountDataset& data, const ModelParams* init = nullptr,
                        bool allow_closed_form = true);

// One fit per lambda, ascending, each warm-started from the previous
// solution. `lambdas` must be sorted ascending and nonnegative.
std::vector<FitResult> regularization_path(ModelFamily family, const PenaltySpec& penalty,
                                           const std::vector<double>& lambdas,
                                           const CountDataset& data);

}  // namespace shrinkcount

#pragma once

#include <string>
#include <vector>

#include "shrinkcount/count_models.hpp"

namespace shrinkcount {

// The penalty catalog. The first five act on the per-variable expected
// success proportions p_i = mean_proportion(params) and so apply to any
// family; the Full* kinds act on a specific family's natural parameters.
//
//   None          0
//   L1Zero        sum p_i                      (shrinks towards all-zero)
//   L2Zero        sum p_i^2
//   LogBarrier    -sum log(1 - p_i)            (unbounded above)
//   LogGreedy     sum log p_i                  (unbounded below; can pin estimates at 0)
//   Kappa         -sum[k log p_i + (1-k) log(1-p_i)]   (shrinks towards p_i = kappa)
//   MeanL2        sum_i sum_j (p_i - p_j)^2    (shrinks the p_i towards one another)
//   MeanQ2        same with p replaced by the normal quantile of p
//   FullZib       sum_i sum_j (gamma_i-gamma_j)^2 + sum_i sum_j (pi_i-pi_j)^2
//   FullBetaBin   sum_i sum_j (alpha_i-alpha_j)^2 + sum_i sum_j (beta_i-beta_j)^2
//
// The pairwise double sums run over all ordered pairs, so each unordered
// pair is counted twice; the constant factor is absorbed by lambda.
enum class PenaltyKind {
  None,
  L1Zero,
  L2Zero,
  LogBarrier,
  LogGreedy,
  Kappa,
  MeanL2,
  MeanQ2,
  FullZib,
  FullBetaBinomial,
};

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::None;
  double kappa = 0.5;  // used by Kappa only, must be in (0, 1)

  // Throws FamilyMismatchError when a Full* kind is paired with the wrong
  // family, std::invalid_argument for a kappa outside (0, 1).
  void validate(ModelFamily family) const;
};

// Evaluates the penalty at the given parameters. MeanQ2 clamps proportions
// to [1e-12, 1 - 1e-12] before the quantile transform, which is unbounded at
// the endpoints.
double penalty_value(const PenaltySpec& spec, const ModelParams& params);

// Gradient of penalty_value with respect to the natural parameters
// (par1, par2 as laid out in ModelParams). d_par2 is left empty for the
// binomial family.
void penalty_gradient(const PenaltySpec& spec, const ModelParams& params,
                      std::vector<double>& d_par1, std::vector<double>& d_par2);

// Full second-derivative matrix with respect to the natural parameters,
// row-major and variable-major: coordinate i for the binomial family,
// (2i, 2i+1) = (par1_i, par2_i) otherwise. `hess` is resized to d*d with
// d = I (binomial) or 2I.
void penalty_hessian(const PenaltySpec& spec, const ModelParams& params,
                     std::vector<double>& hess);

// True when the penalty is a sum of per-variable terms, so a fit may
// optimize each variable independently.
bool penalty_is_separable(PenaltyKind kind);

// Display / CLI vocabulary: none, pen1, pen2, pen3, pen4, pen5, mean-l2,
// mean-q2, full (both Full* kinds).
std::string penalty_name(const PenaltySpec& spec);

}  // namespace shrinkcount

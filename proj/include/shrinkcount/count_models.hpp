#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "shrinkcount/dataset.hpp"

namespace shrinkcount {

enum class ModelFamily { Binomial, Zib, BetaBinomial };

const char* family_name(ModelFamily family);

// Family-tagged parameters, one row per variable. Column meaning by family:
//   Binomial      par1 = p (success probability),        par2 unused
//   Zib           par1 = pi (binomial component prob.),  par2 = gamma (excess-zero prob.)
//   BetaBinomial  par1 = alpha,                          par2 = beta
struct ModelParams {
  ModelFamily family = ModelFamily::Binomial;
  std::vector<double> par1;
  std::vector<double> par2;

  std::size_t size() const { return par1.size(); }

  // Range checks: p, pi in [0,1]; gamma in [0,1); alpha, beta > 0; and par2
  // sized consistently with the family. Throws std::invalid_argument.
  void validate() const;

  static ModelParams binomial(std::vector<double> p);
  static ModelParams zib(std::vector<double> pi, std::vector<double> gamma);
  static ModelParams beta_binomial(std::vector<double> alpha, std::vector<double> beta);
};

// log P(X = x) for X ~ Bin(trials, p). Exactly -inf only where the pmf is
// exactly zero (p = 0 with x > 0, or p = 1 with x < trials).
// Throws std::domain_error outside 0 <= x <= trials, p in [0, 1].
double binom_logpmf(int x, int trials, double p);

// Zero-inflated binomial: an extra atom gamma at zero on top of
// Bin(trials, pi). The x = 0 branch is evaluated by log-sum-exp so that
// (1 - pi)^trials may underflow without harm. gamma in [0, 1).
double zib_logpmf(int x, int trials, double pi, double gamma);

// Beta-binomial via log-gamma: log C(trials, x) + log B(x+alpha, trials-x+beta)
// - log B(alpha, beta). alpha, beta > 0.
double betabinom_logpmf(int x, int trials, double alpha, double beta);

// Dispatch on family; (par1, par2) as in ModelParams.
double family_logpmf(ModelFamily family, int x, int trials, double par1, double par2);

// Sum of logpmf over every observation of every variable.
// Throws std::invalid_argument when params and data sizes disagree.
double log_likelihood(const ModelParams& params, const CountDataset& data);

// Expected success proportion per variable:
//   Binomial p_i; Zib pi_i * (1 - gamma_i); BetaBinomial alpha_i / (alpha_i + beta_i).
std::vector<double> mean_proportion(const ModelParams& params);

struct MleResult {
  ModelParams params;
  // Per-variable: all counts 0 or all counts == trials. The estimate is then a
  // boundary value and downstream consumers may want to know.
  std::vector<bool> degenerate;
};

// Unpenalized maximum likelihood. Binomial is the exact closed form
// sum(x) / (n * trials). Zib and BetaBinomial maximize each variable's
// likelihood numerically (the likelihood factorizes across variables);
// probabilities are kept in [1e-12, 1 - 1e-12] and alpha, beta in
// [1e-8, 1e8] rather than failing on boundary data.
MleResult mle_fit(ModelFamily family, const CountDataset& data);

}  // namespace shrinkcount

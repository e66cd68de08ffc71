#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shrinkcount/count_models.hpp"
#include "shrinkcount/cross_validation.hpp"
#include "shrinkcount/penalties.hpp"
#include "shrinkcount/rng.hpp"

namespace shrinkcount {

// The three parameter-distribution shapes used by the Monte Carlo studies,
// as Beta densities rescaled to an interval:
//   Skew -> Beta(2, 5), Flat -> Beta(5/4, 5/4), Bell -> Beta(10, 10).
enum class Shape { Skew, Flat, Bell };

std::pair<double, double> shape_beta_params(Shape shape);
const char* shape_name(Shape shape);

struct ShapeSpec {
  Shape shape = Shape::Flat;
  double lower = 0.0;  // a
  double upper = 1.0;  // b, > a
};

// Draws u ~ Beta(shape) and returns lower + (upper - lower) * u, per entry.
std::vector<double> sample_scaled_beta(const ShapeSpec& spec, std::size_t count, Rng& rng);

// n_obs independent draws per variable from the family's pmf. Zib draws emit
// 0 with probability gamma and Bin(trials, pi) otherwise; beta-binomial draws
// t ~ Beta(alpha, beta) then Bin(trials, t). Variables are labeled V1..VI.
CountDataset generate_dataset(ModelFamily family, const ModelParams& true_params,
                              int trials, int n_obs, Rng& rng);

// Sum of squared deviations between two equal-length vectors.
double ssd(const std::vector<double>& a, const std::vector<double>& b);

struct SimConfig {
  std::string name = "sim";
  ModelFamily family = ModelFamily::Binomial;
  int num_variables = 10;  // I
  int trials = 40;         // N
  int observations = 50;   // n per variable
  // Binomial: primary = p. Zib: primary = p (expected success proportion),
  // secondary = gamma; the component probability is recovered as
  // pi = p / (1 - gamma), so the bounds must satisfy b + b2 < 1.
  // BetaBinomial: primary = p, secondary = nu in (1, N); alpha and beta are
  // recovered via alpha + beta = (N - nu)/(nu - 1), alpha = p (alpha + beta).
  ShapeSpec primary;
  std::optional<ShapeSpec> secondary;
  std::vector<PenaltySpec> penalties;
  LambdaGrid grid;
  int replications = 100;  // K
  int folds = 10;          // V
  std::uint64_t master_seed = 1;

  // Throws ConfigError listing every problem at once.
  void validate() const;
};

struct MseRow {
  std::string penalty;  // display name; "mincv" for the combined selector
  double ratio_p = 0.0;
  // Incidental parameters: (pi, gamma) for zib, (alpha, beta) for betabin.
  std::optional<double> ratio_par1;
  std::optional<double> ratio_par2;
};

struct MSEReport {
  std::string config_name;
  ModelFamily family = ModelFamily::Binomial;
  std::vector<MseRow> rows;  // one per penalty, plus a mincv row when >= 2 penalties
  double mean_count = 0.0;   // average E[X] over variables, analytic
  double sd_count = 0.0;     // sqrt of average marginal Var(X), analytic
  int replications = 0;
  int excluded = 0;          // replicates dropped for non-finite fits
  std::uint64_t master_seed = 0;
  bool valid = true;         // false when exclusions reach 1% of K
};

// The Monte Carlo study: per replicate, draw true parameters, generate data,
// compute the MLE and each cross-validated penalized estimator, and
// accumulate squared deviations from the truth. Each reported ratio is
// sum-over-replicates of SSD(penalized) over the same sum for the MLE.
// Replicate k uses an RNG stream derived from (master_seed, k), so results
// are reproducible and independent of `threads` (0 means max_threads()).
MSEReport mse_ratio_study(const SimConfig& config, int threads = 0);

// Closed-form summary moments implied by the sampling design.
double analytic_mean_count(const SimConfig& config);
double analytic_sd_count(const SimConfig& config);

}  // namespace shrinkcount

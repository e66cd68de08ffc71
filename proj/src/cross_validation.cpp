#include "shrinkcount/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shrinkcount/errors.hpp"
#include "shrinkcount/rng.hpp"
#include "shrinkcount/threading.hpp"

namespace shrinkcount {

void FoldPlan::validate(const CountDataset& data) const {
  if (folds < 2) throw InvalidVError("FoldPlan: V must be >= 2");
  if (assignments.size() != data.size())
    throw InvalidVError("FoldPlan: plan built for a different dataset");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& a = assignments[i];
    if (a.size() != data.variables[i].counts.size())
      throw InvalidVError("FoldPlan: observation count mismatch");
    std::vector<int> sizes(folds, 0);
    for (int f : a) {
      if (f < 0 || f >= folds) throw InvalidVError("FoldPlan: fold index out of range");
      ++sizes[f];
    }
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    if (*lo < 1 || *hi - *lo > 1)
      throw InvalidVError("FoldPlan: fold sizes must differ by at most one");
  }
}

FoldPlan make_folds(const CountDataset& data, int folds, std::uint64_t seed) {
  data.validate();
  if (folds < 2) throw InvalidVError("make_folds: V must be >= 2");
  for (const auto& v : data.variables) {
    if (static_cast<int>(v.counts.size()) < folds)
      throw InvalidVError("make_folds: V exceeds the sample size of variable '" + v.id + "'");
  }

  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.assignments.resize(data.size());
  Rng base(seed);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t n = data.variables[i].counts.size();
    // Per-variable stream: the plan for variable i depends only on
    // (seed, i, n_i), not on the other variables.
    Rng rng = base.derive(i);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t j = n - 1; j > 0; --j) {
      const std::size_t k = rng.uniform_below(j + 1);
      std::swap(order[j], order[k]);
    }
    auto& a = plan.assignments[i];
    a.resize(n);
    for (std::size_t pos = 0; pos < n; ++pos)
      a[order[pos]] = static_cast<int>(pos % folds);
  }
  return plan;
}

void LambdaGrid::validate() const {
  if (values.empty()) throw std::invalid_argument("LambdaGrid: empty");
  if (values[0] != 0.0) throw std::invalid_argument("LambdaGrid: first value must be 0");
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] > values[k - 1]))
      throw std::invalid_argument("LambdaGrid: values must be strictly increasing");
}

LambdaGrid default_lambda_grid() {
  LambdaGrid grid;
  grid.values.resize(63);
  grid.values[0] = 0.0;
  for (int k = 1; k <= 62; ++k)
    grid.values[k] = std::pow(10.0, -2.0 + 6.0 * (k - 1) / 61.0);
  grid.values[62] = 1e4;
  return grid;
}

namespace {

struct FoldSplit {
  CountDataset train;
  CountDataset valid;
  double nbar_train = 0.0;
};

FoldSplit split_fold(const CountDataset& data, const FoldPlan& plan, int fold) {
  FoldSplit split;
  split.train.variables.resize(data.size());
  split.valid.variables.resize(data.size());
  double total_train = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& v = data.variables[i];
    auto& tr = split.train.variables[i];
    auto& va = split.valid.variables[i];
    tr.id = va.id = v.id;
    tr.trials = va.trials = v.trials;
    for (std::size_t j = 0; j < v.counts.size(); ++j) {
      if (plan.assignments[i][j] == fold)
        va.counts.push_back(v.counts[j]);
      else
        tr.counts.push_back(v.counts[j]);
    }
    total_train += static_cast<double>(tr.counts.size());
  }
  split.nbar_train = total_train / static_cast<double>(data.size());
  return split;
}

struct FoldScores {
  std::vector<double> scores;
  std::vector<bool> flags;
};

FoldScores score_one_fold(ModelFamily family, const PenaltySpec& penalty,
                          const LambdaGrid& grid, const CountDataset& data,
                          const FoldPlan& plan, int fold) {
  const FoldSplit split = split_fold(data, plan, fold);
  FoldScores out;
  out.scores.resize(grid.values.size());
  out.flags.resize(grid.values.size());
  const ModelParams* warm = nullptr;
  FitResult fit;
  for (std::size_t m = 0; m < grid.values.size(); ++m) {
    const double coeff = grid.values[m] * split.nbar_train;
    fit = fit_penalized(family, penalty, coeff, split.train, warm);
    const double score = -log_likelihood(fit.params, split.valid);
    out.scores[m] = score;
    out.flags[m] = !fit.converged || !std::isfinite(score);
    warm = &fit.params;
  }
  return out;
}

double mean_sample_size(const CountDataset& data) {
  double total = 0.0;
  for (const auto& v : data.variables) total += static_cast<double>(v.counts.size());
  return total / static_cast<double>(data.size());
}

// Full-data refit; a short warm-start ladder is the fallback when the direct
// fit from the MLE start stalls at a stiff coefficient.
FitResult final_refit(ModelFamily family, const PenaltySpec& penalty, double coeff,
                      const CountDataset& data) {
  FitResult fit = fit_penalized(family, penalty, coeff, data);
  if (fit.converged || coeff == 0.0) return fit;
  const ModelParams* warm = nullptr;
  FitResult step;
  for (double frac : {0.125, 0.25, 0.5, 1.0}) {
    step = fit_penalized(family, penalty, coeff * frac, data, warm);
    warm = &step.params;
  }
  return step.objective < fit.objective ? step : fit;
}

}  // namespace

CVResult vfcv(ModelFamily family, const PenaltySpec& penalty, const LambdaGrid& grid,
              const CountDataset& data, const FoldPlan& folds, int threads) {
  grid.validate();
  folds.validate(data);
  penalty.validate(family);

  const std::size_t n_lambda = grid.values.size();
  std::vector<FoldScores> per_fold(folds.folds);
  parallel_for(static_cast<std::size_t>(folds.folds), threads, [&](std::size_t v) {
    per_fold[v] = score_one_fold(family, penalty, grid, data, folds, static_cast<int>(v));
  });

  CVResult out;
  out.grid = grid;
  out.penalty = penalty;
  out.scores.assign(n_lambda, 0.0);
  out.score_flags.assign(n_lambda, false);
  for (int v = 0; v < folds.folds; ++v) {  // fixed fold order
    for (std::size_t m = 0; m < n_lambda; ++m) {
      out.scores[m] += per_fold[v].scores[m];
      if (per_fold[v].flags[m]) out.score_flags[m] = true;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (double s : out.scores) best = std::min(best, s);
  std::size_t opt = 0;
  for (std::size_t m = 0; m < n_lambda; ++m) {
    if (out.scores[m] <= best + 1e-9) {  // ties go to the smallest lambda
      opt = m;
      break;
    }
  }
  out.lambda_opt = grid.values[opt];

  out.n_bar = mean_sample_size(data);
  out.final_fit = final_refit(family, penalty, out.lambda_opt * out.n_bar, data);
  out.final_params = out.final_fit.params;
  return out;
}

CVResult min_cv_select(ModelFamily family, const std::vector<PenaltySpec>& penalties,
                       const LambdaGrid& grid, const CountDataset& data,
                       const FoldPlan& folds, int threads) {
  if (penalties.empty())
    throw std::invalid_argument("min_cv_select: need at least one penalty");
  CVResult best;
  double best_score = std::numeric_limits<double>::infinity();
  bool first = true;
  for (const auto& penalty : penalties) {
    CVResult r = vfcv(family, penalty, grid, data, folds, threads);
    const double score = *std::min_element(r.scores.begin(), r.scores.end());
    if (first || score < best_score) {
      best = std::move(r);
      best_score = score;
      first = false;
    }
  }
  return best;
}

}  // namespace shrinkcount

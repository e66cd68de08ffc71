#include "shrinkcount/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shrinkcount/errors.hpp"
#include "shrinkcount/threading.hpp"

namespace shrinkcount {

std::pair<double, double> shape_beta_params(Shape shape) {
  switch (shape) {
    case Shape::Skew: return {2.0, 5.0};
    case Shape::Flat: return {1.25, 1.25};
    case Shape::Bell: return {10.0, 10.0};
  }
  return {1.0, 1.0};
}

const char* shape_name(Shape shape) {
  switch (shape) {
    case Shape::Skew: return "skew";
    case Shape::Flat: return "flat";
    case Shape::Bell: return "bell";
  }
  return "?";
}

std::vector<double> sample_scaled_beta(const ShapeSpec& spec, std::size_t count, Rng& rng) {
  const auto [a, b] = shape_beta_params(spec.shape);
  std::vector<double> out(count);
  for (auto& v : out) v = spec.lower + (spec.upper - spec.lower) * rng.beta(a, b);
  return out;
}

CountDataset generate_dataset(ModelFamily family, const ModelParams& true_params,
                              int trials, int n_obs, Rng& rng) {
  true_params.validate();
  CountDataset data;
  data.variables.resize(true_params.size());
  for (std::size_t i = 0; i < true_params.size(); ++i) {
    auto& v = data.variables[i];
    v.id = "V" + std::to_string(i + 1);
    v.trials = trials;
    v.counts.resize(n_obs);
    for (int j = 0; j < n_obs; ++j) {
      switch (family) {
        case ModelFamily::Binomial:
          v.counts[j] = rng.binomial(trials, true_params.par1[i]);
          break;
        case ModelFamily::Zib:
          v.counts[j] = rng.bernoulli(true_params.par2[i])
                            ? 0
                            : rng.binomial(trials, true_params.par1[i]);
          break;
        case ModelFamily::BetaBinomial: {
          const double t = rng.beta(true_params.par1[i], true_params.par2[i]);
          v.counts[j] = rng.binomial(trials, t);
          break;
        }
      }
    }
  }
  return data;
}

double ssd(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("ssd: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] - b[i]) * (a[i] - b[i]);
  return total;
}

void SimConfig::validate() const {
  std::vector<std::string> problems;
  auto complain = [&](const std::string& msg) { problems.push_back(msg); };

  if (name.empty()) complain("name must not be empty");
  if (num_variables < 1) complain("I must be >= 1");
  if (trials < 1) complain("N must be >= 1");
  if (observations < 1) complain("n must be >= 1");
  if (replications < 1) complain("K must be >= 1");
  if (folds < 2) complain("V must be >= 2");
  if (folds > observations) complain("V must not exceed n");

  if (!(primary.lower >= 0.0 && primary.lower < primary.upper && primary.upper <= 1.0))
    complain("primary bounds need 0 <= a < b <= 1");
  const bool needs_secondary = family != ModelFamily::Binomial;
  if (needs_secondary && !secondary) {
    complain("a2/b2 required for this family");
  } else if (secondary) {
    if (family == ModelFamily::Zib &&
        !(secondary->lower >= 0.0 && secondary->lower < secondary->upper &&
          secondary->upper < 1.0))
      complain("gamma bounds need 0 <= a2 < b2 < 1");
    if (family == ModelFamily::Zib && !(primary.upper + secondary->upper < 1.0))
      complain("need b + b2 < 1 so pi = p / (1 - gamma) stays below 1");
    if (family == ModelFamily::BetaBinomial &&
        !(secondary->lower > 1.0 && secondary->lower < secondary->upper &&
          secondary->upper < trials))
      complain("nu bounds need 1 < a2 < b2 < N");
  }

  if (penalties.empty()) complain("at least one penalty required");
  for (const auto& p : penalties) {
    try {
      p.validate(family);
    } catch (const std::exception& e) {
      complain(e.what());
    }
  }
  try {
    grid.validate();
  } catch (const std::exception& e) {
    complain(std::string("grid: ") + e.what());
  }

  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid simulation config '" << name << "':";
    for (const auto& p : problems) msg << "\n  - " << p;
    throw ConfigError(msg.str());
  }
}

namespace {

struct ScaledBetaMoments {
  double mean;
  double second;  // E[v^2]
};

ScaledBetaMoments scaled_beta_moments(const ShapeSpec& spec) {
  const auto [a, b] = shape_beta_params(spec.shape);
  const double m = a / (a + b);
  const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
  const double width = spec.upper - spec.lower;
  const double mean = spec.lower + width * m;
  const double variance = width * width * var;
  return {mean, variance + mean * mean};
}

ModelParams sample_true_params(const SimConfig& cfg, Rng& rng) {
  switch (cfg.family) {
    case ModelFamily::Binomial:
      return ModelParams::binomial(sample_scaled_beta(cfg.primary, cfg.num_variables, rng));
    case ModelFamily::Zib: {
      // The primary spec bounds the expected success proportions p_i; the
      // binomial component probability is recovered as pi = p / (1 - gamma).
      auto p = sample_scaled_beta(cfg.primary, cfg.num_variables, rng);
      auto gamma = sample_scaled_beta(*cfg.secondary, cfg.num_variables, rng);
      std::vector<double> pi(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) pi[i] = p[i] / (1.0 - gamma[i]);
      return ModelParams::zib(std::move(pi), std::move(gamma));
    }
    case ModelFamily::BetaBinomial: {
      auto p = sample_scaled_beta(cfg.primary, cfg.num_variables, rng);
      auto nu = sample_scaled_beta(*cfg.secondary, cfg.num_variables, rng);
      std::vector<double> alpha(p.size()), beta(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double total = (cfg.trials - nu[i]) / (nu[i] - 1.0);
        alpha[i] = p[i] * total;
        beta[i] = (1.0 - p[i]) * total;
      }
      return ModelParams::beta_binomial(std::move(alpha), std::move(beta));
    }
  }
  throw std::logic_error("unknown family");
}

// Squared-deviation tallies for one estimator against the truth.
struct Deviations {
  double p = 0.0;
  double par1 = 0.0;
  double par2 = 0.0;
};

Deviations deviations(const ModelParams& estimate, const ModelParams& truth) {
  Deviations d;
  d.p = ssd(mean_proportion(estimate), mean_proportion(truth));
  if (truth.family != ModelFamily::Binomial) {
    d.par1 = ssd(estimate.par1, truth.par1);
    d.par2 = ssd(estimate.par2, truth.par2);
  }
  return d;
}

bool finite(const Deviations& d) {
  return std::isfinite(d.p) && std::isfinite(d.par1) && std::isfinite(d.par2);
}

struct ReplicateOutcome {
  Deviations mle;
  std::vector<Deviations> per_penalty;
  int mincv_choice = 0;
  bool failed = false;
};

ReplicateOutcome run_replicate_impl(const SimConfig& cfg, std::uint64_t k) {
  ReplicateOutcome out;
  Rng rng = Rng(cfg.master_seed).derive(k);
  const ModelParams truth = sample_true_params(cfg, rng);
  const CountDataset data =
      generate_dataset(cfg.family, truth, cfg.trials, cfg.observations, rng);
  const std::uint64_t fold_seed = rng.next_u64();
  const FoldPlan folds = make_folds(data, cfg.folds, fold_seed);

  const MleResult mle = mle_fit(cfg.family, data);
  out.mle = deviations(mle.params, truth);
  if (!finite(out.mle)) {
    out.failed = true;
    return out;
  }

  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t pi = 0; pi < cfg.penalties.size(); ++pi) {
    const CVResult cv = vfcv(cfg.family, cfg.penalties[pi], cfg.grid, data, folds);
    out.per_penalty.push_back(deviations(cv.final_params, truth));
    if (!finite(out.per_penalty.back())) {
      out.failed = true;
      return out;
    }
    const double score = *std::min_element(cv.scores.begin(), cv.scores.end());
    if (score < best_score) {
      best_score = score;
      out.mincv_choice = static_cast<int>(pi);
    }
  }
  return out;
}

// A replicate whose fits fail outright is excluded and counted, never fatal.
ReplicateOutcome run_replicate(const SimConfig& cfg, std::uint64_t k) {
  try {
    return run_replicate_impl(cfg, k);
  } catch (const std::exception&) {
    ReplicateOutcome out;
    out.failed = true;
    return out;
  }
}

}  // namespace

double analytic_mean_count(const SimConfig& cfg) {
  const auto prim = scaled_beta_moments(cfg.primary);
  switch (cfg.family) {
    case ModelFamily::Binomial:
    case ModelFamily::BetaBinomial:
      return cfg.trials * prim.mean;
    case ModelFamily::Zib: {
      const auto sec = scaled_beta_moments(*cfg.secondary);
      return cfg.trials * prim.mean * (1.0 - sec.mean);
    }
  }
  throw std::logic_error("unknown family");
}

double analytic_sd_count(const SimConfig& cfg) {
  const auto prim = scaled_beta_moments(cfg.primary);
  const double n_trials = cfg.trials;
  switch (cfg.family) {
    case ModelFamily::Binomial: {
      const double var_p = prim.second - prim.mean * prim.mean;
      const double v = n_trials * (prim.mean - prim.second) + n_trials * n_trials * var_p;
      return std::sqrt(v);
    }
    case ModelFamily::Zib: {
      const auto sec = scaled_beta_moments(*cfg.secondary);
      const double mean = n_trials * prim.mean * (1.0 - sec.mean);
      const double second = (1.0 - sec.mean) * (n_trials * (prim.mean - prim.second) +
                                                n_trials * n_trials * prim.second);
      return std::sqrt(second - mean * mean);
    }
    case ModelFamily::BetaBinomial: {
      const auto sec = scaled_beta_moments(*cfg.secondary);
      const double var_p = prim.second - prim.mean * prim.mean;
      const double v = n_trials * (prim.mean - prim.second) * sec.mean +
                       n_trials * n_trials * var_p;
      return std::sqrt(v);
    }
  }
  throw std::logic_error("unknown family");
}

MSEReport mse_ratio_study(const SimConfig& cfg, int threads) {
  cfg.validate();
  if (threads <= 0) threads = max_threads();

  const std::size_t n_reps = static_cast<std::size_t>(cfg.replications);
  std::vector<ReplicateOutcome> outcomes(n_reps);
  parallel_for(n_reps, threads,
               [&](std::size_t k) { outcomes[k] = run_replicate(cfg, k); });

  MSEReport report;
  report.config_name = cfg.name;
  report.family = cfg.family;
  report.replications = cfg.replications;
  report.master_seed = cfg.master_seed;
  report.mean_count = analytic_mean_count(cfg);
  report.sd_count = analytic_sd_count(cfg);

  const std::size_t n_pen = cfg.penalties.size();
  Deviations den;
  std::vector<Deviations> num(n_pen);
  Deviations num_mincv;
  for (std::size_t k = 0; k < n_reps; ++k) {  // fixed replicate order
    const auto& o = outcomes[k];
    if (o.failed) {
      ++report.excluded;
      continue;
    }
    den.p += o.mle.p;
    den.par1 += o.mle.par1;
    den.par2 += o.mle.par2;
    for (std::size_t pi = 0; pi < n_pen; ++pi) {
      num[pi].p += o.per_penalty[pi].p;
      num[pi].par1 += o.per_penalty[pi].par1;
      num[pi].par2 += o.per_penalty[pi].par2;
    }
    num_mincv.p += o.per_penalty[o.mincv_choice].p;
    num_mincv.par1 += o.per_penalty[o.mincv_choice].par1;
    num_mincv.par2 += o.per_penalty[o.mincv_choice].par2;
  }

  const bool incidental = cfg.family != ModelFamily::Binomial;
  auto make_row = [&](const std::string& label, const Deviations& n) {
    MseRow row;
    row.penalty = label;
    row.ratio_p = n.p / den.p;
    if (incidental) {
      row.ratio_par1 = n.par1 / den.par1;
      row.ratio_par2 = n.par2 / den.par2;
    }
    return row;
  };
  for (std::size_t pi = 0; pi < n_pen; ++pi)
    report.rows.push_back(make_row(penalty_name(cfg.penalties[pi]), num[pi]));
  if (n_pen >= 2) report.rows.push_back(make_row("mincv", num_mincv));

  if (report.excluded * 100 >= report.replications) report.valid = false;
  return report;
}

}  // namespace shrinkcount

// Acceptance suite: end-to-end checks of the numeric contracts, one printed
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
//
// argv[1] (optional): directory holding the bundled simulation configs;
// defaults to "configs".

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "shrinkcount/count_models.hpp"
#include "shrinkcount/cross_validation.hpp"
#include "shrinkcount/estimator.hpp"
#include "shrinkcount/io.hpp"
#include "shrinkcount/penalties.hpp"
#include "shrinkcount/rng.hpp"
#include "shrinkcount/simulation.hpp"
#include "shrinkcount/threading.hpp"

using namespace shrinkcount;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

PenaltySpec spec_of(PenaltyKind kind, double kappa = 0.5) {
  PenaltySpec s;
  s.kind = kind;
  s.kappa = kappa;
  return s;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

CountDataset random_binomial_dataset(Rng& rng, int max_vars, int max_trials, int max_obs) {
  CountDataset d;
  const int n_vars = 1 + (int)rng.uniform_below(max_vars);
  for (int i = 0; i < n_vars; ++i) {
    VariableData v;
    v.id = "V" + std::to_string(i + 1);
    v.trials = 1 + (int)rng.uniform_below(max_trials);
    const int n_obs = 1 + (int)rng.uniform_below(max_obs);
    const double p = 0.02 + 0.93 * rng.uniform01();
    for (int j = 0; j < n_obs; ++j) v.counts.push_back(rng.binomial(v.trials, p));
    d.variables.push_back(std::move(v));
  }
  return d;
}

// --- 1. closed-form oracle suite -------------------------------------------

Outcome criterion1() {
  Rng rng(0xACCE01);
  std::vector<double> lambdas = {0.0};
  for (int k = 0; k < 19; ++k) lambdas.push_back(std::pow(10.0, -2.0 + 5.0 * k / 18.0));
  const PenaltyKind kinds[] = {PenaltyKind::L1Zero, PenaltyKind::LogBarrier,
                               PenaltyKind::LogGreedy, PenaltyKind::Kappa};
  double max_diff = 0.0;
  for (int dset = 0; dset < 200; ++dset) {
    const auto data = random_binomial_dataset(rng, 10, 69, 53);
    for (auto kind : kinds) {
      const auto spec = spec_of(kind, 0.3);
      for (double lambda : lambdas) {
        const auto exact = closed_form_binomial(spec, data, lambda);
        const auto numeric =
            fit_penalized(ModelFamily::Binomial, spec, lambda, data, nullptr, false);
        for (std::size_t i = 0; i < exact.size(); ++i)
          max_diff = std::max(max_diff, std::abs(numeric.params.par1[i] - exact[i]));
      }
    }
  }
  Outcome o;
  o.pass = max_diff <= 1e-6;
  o.detail = "max |numeric - closed form| = " + fmt(max_diff) +
             " over 200 datasets x 20 lambdas x {pen1,pen3,pen4,pen5}";
  return o;
}

// --- 2. lambda = 0 degeneracy ----------------------------------------------

Outcome criterion2() {
  Rng rng(0xACCE02);
  double max_diff = 0.0;
  for (auto family : {ModelFamily::Binomial, ModelFamily::Zib, ModelFamily::BetaBinomial}) {
    std::vector<PenaltySpec> pens = {
        spec_of(PenaltyKind::None),      spec_of(PenaltyKind::L1Zero),
        spec_of(PenaltyKind::L2Zero),    spec_of(PenaltyKind::LogBarrier),
        spec_of(PenaltyKind::LogGreedy), spec_of(PenaltyKind::Kappa, 0.3),
        spec_of(PenaltyKind::MeanL2),    spec_of(PenaltyKind::MeanQ2)};
    if (family == ModelFamily::Zib) pens.push_back(spec_of(PenaltyKind::FullZib));
    if (family == ModelFamily::BetaBinomial)
      pens.push_back(spec_of(PenaltyKind::FullBetaBinomial));

    for (int dset = 0; dset < 50; ++dset) {
      CountDataset data;
      const int n_vars = 1 + (int)rng.uniform_below(6);
      const int trials = 2 + (int)rng.uniform_below(39);
      const int n_obs = 3 + (int)rng.uniform_below(28);
      for (int i = 0; i < n_vars; ++i) {
        VariableData v;
        v.id = "V" + std::to_string(i + 1);
        v.trials = trials;
        for (int j = 0; j < n_obs; ++j) {
          switch (family) {
            case ModelFamily::Binomial:
              v.counts.push_back(rng.binomial(trials, 0.05 + 0.85 * rng.uniform01()));
              break;
            case ModelFamily::Zib: {
              const double pi = 0.08 + 0.42 * rng.uniform01();
              const double gamma = 0.05 + 0.55 * rng.uniform01();
              v.counts.push_back(rng.bernoulli(gamma) ? 0 : rng.binomial(trials, pi));
              break;
            }
            case ModelFamily::BetaBinomial: {
              const double p = 0.08 + 0.42 * rng.uniform01();
              const double nu = 1.3 + (std::min(6.0, trials - 0.1) - 1.3) * rng.uniform01();
              const double total = (trials - nu) / (nu - 1.0);
              v.counts.push_back(rng.binomial(trials, rng.beta(p * total, (1 - p) * total)));
              break;
            }
          }
        }
        data.variables.push_back(std::move(v));
      }

      const auto mle = mle_fit(family, data);
      for (const auto& pen : pens) {
        const auto fit = fit_penalized(family, pen, 0.0, data);
        for (std::size_t i = 0; i < data.size(); ++i) {
          max_diff = std::max(max_diff, std::abs(fit.params.par1[i] - mle.params.par1[i]));
          if (family != ModelFamily::Binomial)
            max_diff =
                std::max(max_diff, std::abs(fit.params.par2[i] - mle.params.par2[i]));
        }
      }
    }
  }
  Outcome o;
  o.pass = max_diff <= 1e-6;
  o.detail = "max |fit(lambda=0) - mle| = " + fmt(max_diff) +
             " over 50 datasets per family, full penalty catalog";
  return o;
}

// --- 3. pmf normalization and limits ---------------------------------------

Outcome criterion3() {
  Rng rng(0xACCE03);
  double worst_sum_err = 0.0;
  for (int trials : {1, 5, 12}) {
    for (int rep = 0; rep < 30; ++rep) {
      const double p = 0.001 + 0.998 * rng.uniform01();
      const double gamma = 0.95 * rng.uniform01();
      const double alpha = 0.05 + 40.0 * rng.uniform01();
      const double beta = 0.05 + 40.0 * rng.uniform01();
      double sb = 0.0, sz = 0.0, sbb = 0.0;
      for (int x = 0; x <= trials; ++x) {
        sb += std::exp(binom_logpmf(x, trials, p));
        sz += std::exp(zib_logpmf(x, trials, p, gamma));
        sbb += std::exp(betabinom_logpmf(x, trials, alpha, beta));
      }
      for (double s : {sb, sz, sbb})
        worst_sum_err = std::max(worst_sum_err, std::abs(s - 1.0));
    }
  }

  bool zib_exact = true;
  for (int rep = 0; rep < 5; ++rep) {
    const int trials = 1 + (int)rng.uniform_below(12);
    const double pi = rng.uniform01();
    for (int x = 0; x <= trials; ++x)
      zib_exact = zib_exact && zib_logpmf(x, trials, pi, 0.0) == binom_logpmf(x, trials, pi);
  }

  double worst_limit_err = 0.0;
  const double c = 1e6;
  for (double p : {0.1, 0.5, 0.9}) {
    for (int x = 0; x <= 40; ++x) {
      const double bb = std::exp(betabinom_logpmf(x, 40, c * p, c * (1.0 - p)));
      const double bin = std::exp(binom_logpmf(x, 40, p));
      worst_limit_err = std::max(worst_limit_err, std::abs(bb - bin));
    }
  }

  Outcome o;
  o.pass = worst_sum_err <= 1e-10 && zib_exact && worst_limit_err <= 1e-4;
  o.detail = "max |sum pmf - 1| = " + fmt(worst_sum_err) +
             ", zib(gamma=0) exact = " + (zib_exact ? "yes" : "NO") +
             ", max betabin-vs-binomial gap at alpha+beta=1e6: " + fmt(worst_limit_err);
  return o;
}

// --- 4. analytic table anchors ---------------------------------------------

Outcome criterion4() {
  struct Anchor {
    double a, b;
    Shape shape;
    double expected;
  };
  const Anchor binom_anchors[] = {
      {0.01, 0.05, Shape::Skew, 0.857},  {0.01, 0.05, Shape::Flat, 1.200},
      {0.01, 0.05, Shape::Bell, 1.200},  {0.01, 0.10, Shape::Skew, 1.429},
      {0.01, 0.10, Shape::Flat, 2.200},  {0.30, 0.50, Shape::Skew, 14.286},
      {0.30, 0.50, Shape::Flat, 16.000}, {0.08, 0.20, Shape::Skew, 4.571},
      {0.08, 0.20, Shape::Flat, 5.600},  {0.31, 0.35, Shape::Skew, 12.857},
      {0.31, 0.35, Shape::Bell, 13.200},
  };
  double max_err = 0.0;
  SimConfig cfg;
  cfg.trials = 40;
  cfg.penalties = {spec_of(PenaltyKind::None)};
  for (const auto& anchor : binom_anchors) {
    cfg.family = ModelFamily::Binomial;
    cfg.secondary.reset();
    cfg.primary = {anchor.shape, anchor.a, anchor.b};
    max_err = std::max(max_err, std::abs(analytic_mean_count(cfg) - anchor.expected));
  }

  struct ZibAnchor {
    double a, b, a2, b2;
    double expected;
  };
  const ZibAnchor zib_anchors[] = {
      {0.01, 0.05, 0.10, 0.14, 0.761},
      {0.04, 0.06, 0.20, 0.30, 1.410},
      {0.05, 0.06, 0.20, 0.70, 1.389},
  };
  for (const auto& anchor : zib_anchors) {
    cfg.family = ModelFamily::Zib;
    cfg.primary = {Shape::Skew, anchor.a, anchor.b};
    cfg.secondary = ShapeSpec{Shape::Skew, anchor.a2, anchor.b2};
    max_err = std::max(max_err, std::abs(analytic_mean_count(cfg) - anchor.expected));
  }

  Outcome o;
  o.pass = max_err <= 1e-3;
  o.detail = "max |analytic mean count - table value| = " + fmt(max_err) +
             " across 11 binomial and 3 zib anchors";
  return o;
}

// --- 5. desk-scale Monte Carlo reproduction --------------------------------

double row_ratio(const MSEReport& report, const std::string& penalty) {
  for (const auto& row : report.rows)
    if (row.penalty == penalty) return row.ratio_p;
  return std::numeric_limits<double>::quiet_NaN();
}

bool mincv_near_best(const MSEReport& report, std::string& note) {
  double best = std::numeric_limits<double>::infinity();
  double mincv = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : report.rows) {
    if (row.penalty == "mincv")
      mincv = row.ratio_p;
    else
      best = std::min(best, row.ratio_p);
  }
  if (!std::isfinite(mincv)) return true;  // single-penalty run
  note += " mincv=" + fmt(mincv) + "/best=" + fmt(best);
  return mincv <= 1.15 * best;
}

Outcome criterion5(const std::string& configs_dir) {
  Outcome o;
  const int threads = max_threads();
  std::ostringstream detail;

  // Table 1 row: flat (0.01, 0.05), pen2 target 0.968 +/- 0.05.
  {
    const auto cfg = load_sim_config(configs_dir + "/table1_flat_001_005.cfg");
    const auto rep = mse_ratio_study(cfg, threads);
    const double r = row_ratio(rep, "pen2");
    std::string note;
    const bool ok = rep.valid && std::abs(r - 0.968) <= 0.05 && mincv_near_best(rep, note);
    o.pass = o.pass && ok;
    detail << " t1[pen2=" << fmt(r) << " target 0.968+-0.05" << note
           << (ok ? " ok]" : " FAIL]");
  }
  // Table 2 row: bell (0.31, 0.35), mean-l2 target 0.292 +/- 0.12 and < 0.6.
  {
    const auto cfg = load_sim_config(configs_dir + "/table2_bell_031_035.cfg");
    const auto rep = mse_ratio_study(cfg, threads);
    const double r = row_ratio(rep, "mean-l2");
    std::string note;
    const bool ok = rep.valid && std::abs(r - 0.292) <= 0.12 && r < 0.6 &&
                    mincv_near_best(rep, note);
    o.pass = o.pass && ok;
    detail << " t2[mean-l2=" << fmt(r) << " target 0.292+-0.12,<0.6" << note
           << (ok ? " ok]" : " FAIL]");
  }
  // Table 3 row: bell p (0.05, 0.06), gamma (0.20, 0.70); mean target
  // 0.183 +/- 0.12, zero shrinkage within [0.85, 1.05].
  {
    const auto cfg = load_sim_config(configs_dir + "/table3_bell_pi005_006_g020_070.cfg");
    const auto rep = mse_ratio_study(cfg, threads);
    const double rm = row_ratio(rep, "mean-l2");
    const double rz = row_ratio(rep, "pen2");
    std::string note;
    const bool ok = rep.valid && std::abs(rm - 0.183) <= 0.12 && rz >= 0.85 &&
                    rz <= 1.05 && mincv_near_best(rep, note);
    o.pass = o.pass && ok;
    detail << " t3[mean-l2=" << fmt(rm) << " target 0.183+-0.12, pen2=" << fmt(rz)
           << " in [0.85,1.05]" << note << (ok ? " ok]" : " FAIL]");
  }
  // Table 4 row: bell p (0.05, 0.06), nu (2, 10); mean target 0.155 +/- 0.12.
  {
    const auto cfg = load_sim_config(configs_dir + "/table4_bell_p005_006_nu2_10.cfg");
    const auto rep = mse_ratio_study(cfg, threads);
    const double r = row_ratio(rep, "mean-l2");
    std::string note;
    const bool ok = rep.valid && std::abs(r - 0.155) <= 0.12 && mincv_near_best(rep, note);
    o.pass = o.pass && ok;
    detail << " t4[mean-l2=" << fmt(r) << " target 0.155+-0.12" << note
           << (ok ? " ok]" : " FAIL]");
  }

  o.detail = detail.str();
  return o;
}

// --- 6. property suites ------------------------------------------------------

Outcome criterion6() {
  Rng rng(0xACCE06);
  std::ostringstream detail;
  bool pass = true;

  // penalty bounds
  {
    bool ok = true;
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 1 + (int)rng.uniform_below(10);
      std::vector<double> p(n);
      for (auto& v : p) v = rng.uniform01();
      const auto params = ModelParams::binomial(p);
      const double p1 = penalty_value(spec_of(PenaltyKind::L1Zero), params);
      const double p2 = penalty_value(spec_of(PenaltyKind::L2Zero), params);
      ok = ok && p2 >= 0.0 && p2 <= p1 + 1e-15 && p1 <= n + 1e-15;
    }
    pass = pass && ok;
    detail << " bounds=" << (ok ? "ok" : "FAIL");
  }

  // shrinkage monotonicity in lambda (pen1..pen4)
  {
    bool ok = true;
    const std::vector<double> grid = {0.0, 0.1, 1.0, 5.0, 20.0, 100.0, 1000.0};
    for (int rep = 0; rep < 5; ++rep) {
      const auto data = random_binomial_dataset(rng, 5, 45, 25);
      for (auto kind : {PenaltyKind::L1Zero, PenaltyKind::L2Zero, PenaltyKind::LogBarrier,
                        PenaltyKind::LogGreedy}) {
        std::vector<double> prev(data.size(), std::numeric_limits<double>::infinity());
        for (double lambda : grid) {
          const auto fit = fit_penalized(ModelFamily::Binomial, spec_of(kind), lambda, data);
          for (std::size_t i = 0; i < data.size(); ++i) {
            ok = ok && fit.params.par1[i] <= prev[i] + 1e-7;
            prev[i] = fit.params.par1[i];
          }
        }
      }
    }
    pass = pass && ok;
    detail << " monotone=" << (ok ? "ok" : "FAIL");
  }

  // pen5 containment between the MLE and kappa
  {
    bool ok = true;
    for (int rep = 0; rep < 5; ++rep) {
      const auto data = random_binomial_dataset(rng, 5, 45, 25);
      const auto mle = mle_fit(ModelFamily::Binomial, data);
      const double kappa = 0.05 + 0.9 * rng.uniform01();
      for (double lambda : {0.0, 0.5, 5.0, 500.0, 5e7}) {
        const auto sol =
            closed_form_binomial(spec_of(PenaltyKind::Kappa, kappa), data, lambda);
        for (std::size_t i = 0; i < data.size(); ++i) {
          const double lo = std::min(mle.params.par1[i], kappa) - 1e-12;
          const double hi = std::max(mle.params.par1[i], kappa) + 1e-12;
          ok = ok && sol[i] >= lo && sol[i] <= hi;
        }
      }
    }
    pass = pass && ok;
    detail << " pen5-containment=" << (ok ? "ok" : "FAIL");
  }

  // pairwise penalties zero iff equal
  {
    bool ok = true;
    for (int rep = 0; rep < 50; ++rep) {
      const int n = 2 + (int)rng.uniform_below(6);
      std::vector<double> a(n), b(n);
      for (int i = 0; i < n; ++i) {
        a[i] = 0.05 + 0.9 * rng.uniform01();
        b[i] = 0.05 + 0.8 * rng.uniform01();
      }
      const auto zib = ModelParams::zib(a, b);
      ok = ok && penalty_value(spec_of(PenaltyKind::FullZib), zib) > 0.0;
      const auto flat =
          ModelParams::zib(std::vector<double>(n, a[0]), std::vector<double>(n, b[0]));
      ok = ok && penalty_value(spec_of(PenaltyKind::FullZib), flat) == 0.0;
      ok = ok && penalty_value(spec_of(PenaltyKind::MeanL2),
                               ModelParams::binomial(std::vector<double>(n, a[0]))) == 0.0;
      ok = ok && penalty_value(spec_of(PenaltyKind::MeanQ2),
                               ModelParams::binomial(std::vector<double>(n, a[0]))) == 0.0;
      ok = ok && penalty_value(spec_of(PenaltyKind::MeanL2), ModelParams::binomial(a)) > 0.0;
    }
    pass = pass && ok;
    detail << " pairwise-zero-iff-equal=" << (ok ? "ok" : "FAIL");
  }

  // fold partition validity
  {
    bool ok = true;
    for (int rep = 0; rep < 30; ++rep) {
      const int n_vars = 1 + (int)rng.uniform_below(6);
      CountDataset d;
      int min_obs = 1 << 20;
      for (int i = 0; i < n_vars; ++i) {
        VariableData v;
        v.id = "V" + std::to_string(i);
        v.trials = 10;
        const int n_obs = 4 + (int)rng.uniform_below(40);
        min_obs = std::min(min_obs, n_obs);
        for (int j = 0; j < n_obs; ++j) v.counts.push_back((int)rng.uniform_below(11));
        d.variables.push_back(std::move(v));
      }
      const int folds = 2 + (int)rng.uniform_below(std::min(9, min_obs - 1));
      try {
        make_folds(d, folds, rng.next_u64()).validate(d);
      } catch (...) {
        ok = false;
      }
    }
    pass = pass && ok;
    detail << " folds=" << (ok ? "ok" : "FAIL");
  }

  // seed reproducibility independent of thread count
  {
    SimConfig cfg;
    cfg.name = "threads";
    cfg.family = ModelFamily::Zib;
    cfg.num_variables = 4;
    cfg.trials = 15;
    cfg.observations = 12;
    cfg.primary = {Shape::Bell, 0.10, 0.20};
    cfg.secondary = ShapeSpec{Shape::Bell, 0.15, 0.25};
    cfg.penalties = {spec_of(PenaltyKind::L2Zero), spec_of(PenaltyKind::FullZib)};
    LambdaGrid grid;
    grid.values = {0.0, 0.1, 1.0, 10.0, 100.0};
    cfg.grid = grid;
    cfg.replications = 4;
    cfg.folds = 4;
    cfg.master_seed = 99;
    const auto a = mse_ratio_study(cfg, 1);
    const auto b = mse_ratio_study(cfg, 3);
    bool ok = a.rows.size() == b.rows.size();
    for (std::size_t r = 0; ok && r < a.rows.size(); ++r)
      ok = a.rows[r].ratio_p == b.rows[r].ratio_p &&
           *a.rows[r].ratio_par1 == *b.rows[r].ratio_par1 &&
           *a.rows[r].ratio_par2 == *b.rows[r].ratio_par2;
    pass = pass && ok;
    detail << " thread-independent=" << (ok ? "ok" : "FAIL");
  }

  Outcome o;
  o.pass = pass;
  o.detail = detail.str();
  return o;
}

// --- 7. near-homogeneous beta-binomial substitute check ---------------------

Outcome criterion7() {
  const auto grid = default_lambda_grid();
  int positive_lambda = 0, narrower = 0;
  const int runs = 30;
  for (int run = 0; run < runs; ++run) {
    Rng rng(777000 + run);
    const ShapeSpec p_spec{Shape::Bell, 0.025, 0.045};  // 0.02-wide band
    const ShapeSpec nu_spec{Shape::Bell, 2.0, 6.0};
    auto p = sample_scaled_beta(p_spec, 10, rng);
    auto nu = sample_scaled_beta(nu_spec, 10, rng);
    std::vector<double> alpha(10), beta(10);
    for (int i = 0; i < 10; ++i) {
      const double total = (40.0 - nu[i]) / (nu[i] - 1.0);
      alpha[i] = p[i] * total;
      beta[i] = (1.0 - p[i]) * total;
    }
    const auto truth = ModelParams::beta_binomial(alpha, beta);
    const auto data = generate_dataset(ModelFamily::BetaBinomial, truth, 40, 50, rng);
    const auto folds = make_folds(data, 10, rng.next_u64());
    const auto cv = vfcv(ModelFamily::BetaBinomial, spec_of(PenaltyKind::FullBetaBinomial),
                         grid, data, folds);
    if (cv.lambda_opt > 0.0) ++positive_lambda;

    const auto phat = mean_proportion(mle_fit(ModelFamily::BetaBinomial, data).params);
    const auto ptil = mean_proportion(cv.final_params);
    const double mle_range = *std::max_element(phat.begin(), phat.end()) -
                             *std::min_element(phat.begin(), phat.end());
    const double pen_range = *std::max_element(ptil.begin(), ptil.end()) -
                             *std::min_element(ptil.begin(), ptil.end());
    if (pen_range < mle_range) ++narrower;
  }
  Outcome o;
  o.pass = positive_lambda >= 24 && narrower >= 27;
  o.detail = "positive lambda in " + std::to_string(positive_lambda) +
             "/30 (need >= 24), narrower estimate range in " + std::to_string(narrower) +
             "/30 (need >= 27)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string configs_dir = argc > 1 ? argv[1] : "configs";
  int failures = 0;

  auto run = [&](int index, const char* name, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (index == 1 && secs > 120.0) {
      o.pass = false;
      o.detail += " [runtime budget of 120 s exceeded]";
    }
    std::printf("criterion %d (%s): %s  %s (%.1f s)\n", index, name,
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  run(1, "closed-form oracle suite", criterion1);
  run(2, "lambda = 0 degeneracy", criterion2);
  run(3, "pmf normalization and limits", criterion3);
  run(4, "analytic table anchors", criterion4);
  run(5, "desk-scale Monte Carlo reproduction",
      [&] { return criterion5(configs_dir); });
  run(6, "property suites", criterion6);
  run(7, "near-homogeneous shrinkage behavior", criterion7);

  std::printf("acceptance: %d/7 criteria passed\n", 7 - failures);
  return failures == 0 ? 0 : 1;
}

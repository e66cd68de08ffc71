#pragma once

// Internal: per-variable negative log-likelihoods on sufficient statistics,
// their natural-parameter gradients, the logit/log reparameterization shared
// by every numeric fit, and moment-based starting values. Not installed.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "shrinkcount/count_models.hpp"
#include "shrinkcount/dataset.hpp"
#include "shrinkcount/optim.hpp"
#include "shrinkcount/special.hpp"

namespace shrinkcount::detail {

// Optimization box: probabilities live in [kProbMin, 1 - kProbMin], shape
// parameters (alpha, beta) in [kShapeMin, kShapeMax].
inline constexpr double kProbMin = 1e-12;
inline constexpr double kShapeMin = 1e-8;
inline constexpr double kShapeMax = 1e8;

inline double sigmoid(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double clamp_prob(double p) {
  return std::clamp(p, kProbMin, 1.0 - kProbMin);
}

inline double clamp_shape(double v) {
  return std::clamp(v, kShapeMin, kShapeMax);
}

// Transformed-scale bounds matching the clamps above.
inline double logit_bound() { return logit(1.0 - kProbMin); }
inline double log_shape_lo() { return std::log(kShapeMin); }
inline double log_shape_hi() { return std::log(kShapeMax); }

// Transformed gradients vanish at the box edges (dtheta/dz -> 0), so a run
// can stop on a clamp even when the optimum is interior. Check the
// natural-scale slope at every clamped coordinate and rerun once from a
// pulled-in point when it points into the box. `log_scale` selects the
// exp transform (alpha, beta) over the logit one.
template <class FGH>
NewtonResult newton_within_clamps(FGH&& fgh, std::vector<double> z0,
                                  const std::vector<double>& lo,
                                  const std::vector<double>& hi, bool log_scale,
                                  const NewtonOptions& opts = {}) {
  NewtonResult r = minimize_newton(fgh, std::move(z0), lo, hi, opts);

  std::vector<double> g, h;
  std::vector<double> z = r.x;
  fgh(z, g, h, true);
  bool restart = false;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double theta = log_scale ? std::exp(z[j]) : sigmoid(z[j]);
    const double deriv = log_scale ? theta : theta * (1.0 - theta);
    const double g_nat = deriv > 0.0 ? g[j] / deriv : 0.0;
    if (z[j] >= hi[j] - 1e-9 && g_nat > 1e-7) {
      z[j] = log_scale ? hi[j] - 4.6 : logit(1.0 - 1e-3);
      restart = true;
    } else if (z[j] <= lo[j] + 1e-9 && g_nat < -1e-7) {
      z[j] = log_scale ? lo[j] + 4.6 : logit(1e-3);
      restart = true;
    }
  }
  if (!restart) return r;

  NewtonResult retried = minimize_newton(fgh, std::move(z), lo, hi, opts);
  retried.iterations += r.iterations;
  return retried.value <= r.value ? retried : r;
}

// --- Binomial -------------------------------------------------------------
// The binomial likelihood in p depends on the data only through the total
// success count and total trial count, so multi-observation variables reduce
// to a single aggregated draw.

struct BinomSuff {
  double successes = 0.0;       // sum over observations of x
  double total_trials = 0.0;    // n * trials
  double log_choose_sum = 0.0;  // sum of log C(trials, x), constant in p
};

inline BinomSuff binom_suff(const VariableData& v) {
  BinomSuff s;
  s.total_trials = static_cast<double>(v.counts.size()) * v.trials;
  for (int x : v.counts) {
    s.successes += x;
    s.log_choose_sum += log_choose(v.trials, x);
  }
  return s;
}

inline double binom_nll(const BinomSuff& s, double p) {
  double ll = s.log_choose_sum;
  if (s.successes > 0.0) ll += s.successes * std::log(p);
  if (s.total_trials - s.successes > 0.0)
    ll += (s.total_trials - s.successes) * std::log1p(-p);
  return -ll;
}

// d(-ll)/dp
inline double binom_nll_dp(const BinomSuff& s, double p) {
  return -(s.successes / p - (s.total_trials - s.successes) / (1.0 - p));
}

// d2(-ll)/dp2
inline double binom_nll_d2p(const BinomSuff& s, double p) {
  return s.successes / (p * p) +
         (s.total_trials - s.successes) / ((1.0 - p) * (1.0 - p));
}

// --- Zero-inflated binomial -------------------------------------------------
// Sufficient statistics: the zero count, and (count, success-sum, constant)
// over the strictly positive observations.

struct ZibSuff {
  int n_zero = 0;
  int n_pos = 0;
  double pos_successes = 0.0;
  double log_choose_sum = 0.0;  // over positive observations only
  int trials = 0;
  int n_obs = 0;
};

inline ZibSuff zib_suff(const VariableData& v) {
  ZibSuff s;
  s.trials = v.trials;
  s.n_obs = static_cast<int>(v.counts.size());
  for (int x : v.counts) {
    if (x == 0) {
      ++s.n_zero;
    } else {
      ++s.n_pos;
      s.pos_successes += x;
      s.log_choose_sum += log_choose(v.trials, x);
    }
  }
  return s;
}

// log[gamma + (1-gamma) (1-pi)^N], stable for (1-pi)^N underflowing.
inline double zib_log_f0(int trials, double pi, double gamma) {
  const double t2 = std::log1p(-gamma) + trials * std::log1p(-pi);
  if (gamma <= 0.0) return t2;
  const double t1 = std::log(gamma);
  const double m = std::max(t1, t2);
  return m + std::log1p(std::exp(std::min(t1, t2) - m));
}

inline double zib_nll(const ZibSuff& s, double pi, double gamma) {
  double ll = 0.0;
  if (s.n_zero > 0) ll += s.n_zero * zib_log_f0(s.trials, pi, gamma);
  if (s.n_pos > 0) {
    ll += s.n_pos * std::log1p(-gamma) + s.log_choose_sum;
    ll += s.pos_successes * std::log(pi);
    const double rest = s.n_pos * static_cast<double>(s.trials) - s.pos_successes;
    if (rest > 0.0) ll += rest * std::log1p(-pi);
  }
  return -ll;
}

// Gradient of the NLL with respect to (pi, gamma).
inline std::pair<double, double> zib_nll_grad(const ZibSuff& s, double pi, double gamma) {
  double dll_dpi = 0.0, dll_dgamma = 0.0;
  if (s.n_zero > 0) {
    const double logf0 = zib_log_f0(s.trials, pi, gamma);
    // (1-gamma) N (1-pi)^{N-1} / f0
    const double ratio_pi =
        std::exp(std::log1p(-gamma) + (s.trials - 1) * std::log1p(-pi) - logf0);
    dll_dpi -= s.n_zero * s.trials * ratio_pi;
    const double lw = s.trials * std::log1p(-pi);   // log (1-pi)^N
    const double one_minus_w = -std::expm1(lw);
    dll_dgamma += s.n_zero * one_minus_w * std::exp(-logf0);
  }
  if (s.n_pos > 0) {
    dll_dpi += s.pos_successes / pi;
    const double rest = s.n_pos * static_cast<double>(s.trials) - s.pos_successes;
    if (rest > 0.0) dll_dpi -= rest / (1.0 - pi);
    dll_dgamma -= s.n_pos / (1.0 - gamma);
  }
  return {-dll_dpi, -dll_dgamma};
}

// Symmetric 2x2 second-derivative block of the NLL in natural coordinates.
struct Hess2 {
  double h11 = 0.0;  // d2/d(par1)^2
  double h12 = 0.0;
  double h22 = 0.0;  // d2/d(par2)^2
};

inline Hess2 zib_nll_hess(const ZibSuff& s, double pi, double gamma) {
  Hess2 h;
  if (s.n_zero > 0) {
    const double logf0 = zib_log_f0(s.trials, pi, gamma);
    const double log_1g = std::log1p(-gamma);
    const double log_1p = std::log1p(-pi);
    // A = df0/dpi = -(1-gamma) N (1-pi)^{N-1},  B = df0/dgamma = 1 - w
    const double a_over_f0 = -s.trials * std::exp(log_1g + (s.trials - 1) * log_1p - logf0);
    const double b_over_f0 = -std::expm1(s.trials * log_1p) * std::exp(-logf0);
    // d2f0/dpi2 / f0 and d2f0/dpi dgamma / f0
    const double papa =
        (s.trials > 1)
            ? s.trials * (s.trials - 1.0) * std::exp(log_1g + (s.trials - 2) * log_1p - logf0)
            : 0.0;
    const double paga = s.trials * std::exp((s.trials - 1) * log_1p - logf0);
    // log f0 second derivatives, then negate for the NLL
    h.h11 -= s.n_zero * (papa - a_over_f0 * a_over_f0);
    h.h12 -= s.n_zero * (paga - a_over_f0 * b_over_f0);
    h.h22 -= s.n_zero * (-b_over_f0 * b_over_f0);
  }
  if (s.n_pos > 0) {
    h.h11 += s.pos_successes / (pi * pi);
    const double rest = s.n_pos * static_cast<double>(s.trials) - s.pos_successes;
    if (rest > 0.0) h.h11 += rest / ((1.0 - pi) * (1.0 - pi));
    h.h22 += s.n_pos / ((1.0 - gamma) * (1.0 - gamma));
  }
  return h;
}

// Moment start: binomial rate of the positive part, then the zero excess.
inline std::pair<double, double> zib_start(const ZibSuff& s) {
  double pi0;
  if (s.n_pos > 0) {
    pi0 = (s.pos_successes / s.n_pos) / s.trials;
  } else {
    pi0 = 0.5 / s.trials;
  }
  pi0 = std::clamp(pi0, 1e-4, 1.0 - 1e-4);
  const double w = std::exp(s.trials * std::log1p(-pi0));
  const double zero_frac = static_cast<double>(s.n_zero) / s.n_obs;
  double gamma0 = (zero_frac - w) / (1.0 - w);
  gamma0 = std::clamp(gamma0, 1e-4, 1.0 - 1e-4);
  return {pi0, gamma0};
}

// --- Beta-binomial ----------------------------------------------------------
// No finite-dimensional sufficient statistic; a count histogram keeps the
// per-evaluation log-gamma work proportional to the number of distinct counts.

struct BetaBinSuff {
  std::vector<std::pair<int, int>> hist;  // (count value, frequency)
  int trials = 0;
  int n_obs = 0;
  double log_choose_sum = 0.0;
};

inline BetaBinSuff betabin_suff(const VariableData& v) {
  BetaBinSuff s;
  s.trials = v.trials;
  s.n_obs = static_cast<int>(v.counts.size());
  std::vector<int> freq(v.trials + 1, 0);
  for (int x : v.counts) ++freq[x];
  for (int x = 0; x <= v.trials; ++x) {
    if (freq[x] > 0) {
      s.hist.emplace_back(x, freq[x]);
      s.log_choose_sum += freq[x] * log_choose(v.trials, x);
    }
  }
  return s;
}

inline double betabin_nll(const BetaBinSuff& s, double alpha, double beta) {
  double ll = s.log_choose_sum;
  for (const auto& [x, c] : s.hist) {
    ll += c * (std::lgamma(x + alpha) + std::lgamma(s.trials - x + beta));
  }
  ll -= s.n_obs * std::lgamma(s.trials + alpha + beta);
  ll -= s.n_obs * (std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta));
  return -ll;
}

inline std::pair<double, double> betabin_nll_grad(const BetaBinSuff& s, double alpha,
                                                  double beta) {
  double da = 0.0, db = 0.0;
  for (const auto& [x, c] : s.hist) {
    da += c * digamma(x + alpha);
    db += c * digamma(s.trials - x + beta);
  }
  const double shared = s.n_obs * (digamma(alpha + beta) - digamma(s.trials + alpha + beta));
  da += shared - s.n_obs * digamma(alpha);
  db += shared - s.n_obs * digamma(beta);
  return {-da, -db};
}

inline Hess2 betabin_nll_hess(const BetaBinSuff& s, double alpha, double beta) {
  Hess2 h;
  double aa = 0.0, bb = 0.0;
  for (const auto& [x, c] : s.hist) {
    aa += c * trigamma(x + alpha);
    bb += c * trigamma(s.trials - x + beta);
  }
  const double shared =
      s.n_obs * (trigamma(alpha + beta) - trigamma(s.trials + alpha + beta));
  h.h11 = -(aa + shared - s.n_obs * trigamma(alpha));
  h.h12 = -shared;
  h.h22 = -(bb + shared - s.n_obs * trigamma(beta));
  return h;
}

// Moment start via the mean/overdispersion parameterization.
inline std::pair<double, double> betabin_start(const BetaBinSuff& s) {
  double mean = 0.0, sq = 0.0;
  for (const auto& [x, c] : s.hist) {
    mean += static_cast<double>(c) * x;
    sq += static_cast<double>(c) * x * x;
  }
  mean /= s.n_obs;
  sq /= s.n_obs;
  const double var = std::max(sq - mean * mean, 1e-8);
  double p0 = std::clamp(mean / s.trials, 1e-4, 1.0 - 1e-4);
  const double binom_var = s.trials * p0 * (1.0 - p0);
  double total = 1.0;  // alpha + beta; only the ratio matters when trials == 1
  if (s.trials >= 2) {
    const double nu0 =
        std::clamp(var / std::max(binom_var, 1e-12), 1.05, s.trials - 0.05);
    total = (s.trials - nu0) / (nu0 - 1.0);
  }
  return {clamp_shape(p0 * total), clamp_shape((1.0 - p0) * total)};
}

}  // namespace shrinkcount::detail

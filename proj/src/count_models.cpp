#include "shrinkcount/count_models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "shrinkcount/errors.hpp"
#include "shrinkcount/optim.hpp"
#include "shrinkcount/special.hpp"
#include "family_nll.hpp"

namespace shrinkcount {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_count(int x, int trials) {
  if (trials < 0 || x < 0 || x > trials)
    throw std::domain_error("count outside [0, trials]");
}
}  // namespace

const char* family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::Binomial: return "binomial";
    case ModelFamily::Zib: return "zib";
    case ModelFamily::BetaBinomial: return "betabin";
  }
  return "?";
}

void ModelParams::validate() const {
  const bool two_cols = family != ModelFamily::Binomial;
  if (par1.empty()) throw std::invalid_argument("ModelParams: no variables");
  if (two_cols && par2.size() != par1.size())
    throw std::invalid_argument("ModelParams: par2 size mismatch");
  for (std::size_t i = 0; i < par1.size(); ++i) {
    switch (family) {
      case ModelFamily::Binomial:
        if (!(par1[i] >= 0.0 && par1[i] <= 1.0))
          throw std::invalid_argument("ModelParams: p outside [0, 1]");
        break;
      case ModelFamily::Zib:
        if (!(par1[i] >= 0.0 && par1[i] <= 1.0))
          throw std::invalid_argument("ModelParams: pi outside [0, 1]");
        if (!(par2[i] >= 0.0 && par2[i] < 1.0))
          throw std::invalid_argument("ModelParams: gamma outside [0, 1)");
        break;
      case ModelFamily::BetaBinomial:
        if (!(par1[i] > 0.0) || !(par2[i] > 0.0))
          throw std::invalid_argument("ModelParams: alpha, beta must be > 0");
        break;
    }
  }
}

ModelParams ModelParams::binomial(std::vector<double> p) {
  ModelParams m;
  m.family = ModelFamily::Binomial;
  m.par1 = std::move(p);
  return m;
}

ModelParams ModelParams::zib(std::vector<double> pi, std::vector<double> gamma) {
  ModelParams m;
  m.family = ModelFamily::Zib;
  m.par1 = std::move(pi);
  m.par2 = std::move(gamma);
  return m;
}

ModelParams ModelParams::beta_binomial(std::vector<double> alpha, std::vector<double> beta) {
  ModelParams m;
  m.family = ModelFamily::BetaBinomial;
  m.par1 = std::move(alpha);
  m.par2 = std::move(beta);
  return m;
}

double binom_logpmf(int x, int trials, double p) {
  check_count(x, trials);
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binom_logpmf: p outside [0, 1]");
  if (p == 0.0) return x == 0 ? 0.0 : kNegInf;
  if (p == 1.0) return x == trials ? 0.0 : kNegInf;
  double ll = log_choose(trials, x);
  if (x > 0) ll += x * std::log(p);
  if (x < trials) ll += (trials - x) * std::log1p(-p);
  return ll;
}

double zib_logpmf(int x, int trials, double pi, double gamma) {
  check_count(x, trials);
  if (!(pi >= 0.0 && pi <= 1.0)) throw std::domain_error("zib_logpmf: pi outside [0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::domain_error("zib_logpmf: gamma outside [0, 1)");
  if (gamma == 0.0) return binom_logpmf(x, trials, pi);
  if (x > 0) return std::log1p(-gamma) + binom_logpmf(x, trials, pi);
  // x == 0: log[gamma + (1 - gamma)(1 - pi)^N], larger term factored out.
  const double t1 = std::log(gamma);
  const double t2 = std::log1p(-gamma) + (pi < 1.0 ? trials * std::log1p(-pi) : kNegInf);
  const double m = std::max(t1, t2);
  if (m == kNegInf) return kNegInf;
  return m + std::log1p(std::exp(std::min(t1, t2) - m));
}

double betabinom_logpmf(int x, int trials, double alpha, double beta) {
  check_count(x, trials);
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::domain_error("betabinom_logpmf: alpha, beta must be > 0");
  return log_choose(trials, x) + log_beta_fn(x + alpha, trials - x + beta) -
         log_beta_fn(alpha, beta);
}

double family_logpmf(ModelFamily family, int x, int trials, double par1, double par2) {
  switch (family) {
    case ModelFamily::Binomial: return binom_logpmf(x, trials, par1);
    case ModelFamily::Zib: return zib_logpmf(x, trials, par1, par2);
    case ModelFamily::BetaBinomial: return betabinom_logpmf(x, trials, par1, par2);
  }
  throw std::logic_error("unknown family");
}

double log_likelihood(const ModelParams& params, const CountDataset& data) {
  if (params.size() != data.size())
    throw std::invalid_argument("log_likelihood: params/data dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& v = data.variables[i];
    const double a = params.par1[i];
    const double b = params.par2.empty() ? 0.0 : params.par2[i];
    for (int x : v.counts) total += family_logpmf(params.family, x, v.trials, a, b);
  }
  return total;
}

std::vector<double> mean_proportion(const ModelParams& params) {
  std::vector<double> p(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    switch (params.family) {
      case ModelFamily::Binomial:
        p[i] = params.par1[i];
        break;
      case ModelFamily::Zib:
        p[i] = params.par1[i] * (1.0 - params.par2[i]);
        break;
      case ModelFamily::BetaBinomial:
        p[i] = params.par1[i] / (params.par1[i] + params.par2[i]);
        break;
    }
  }
  return p;
}

namespace {

bool all_at_boundary(const VariableData& v, bool& all_zero) {
  bool zero = true, full = true;
  for (int x : v.counts) {
    if (x != 0) zero = false;
    if (x != v.trials) full = false;
  }
  all_zero = zero;
  return zero || full;
}

// Per-variable ZIB likelihood maximization on the logit scale.
std::pair<double, double> fit_zib_variable(const VariableData& v) {
  const auto suff = detail::zib_suff(v);
  const auto [pi0, gamma0] = detail::zib_start(suff);
  const double bound = detail::logit_bound();
  auto fgh = [&](const std::vector<double>& z, std::vector<double>& g,
                 std::vector<double>& h, bool want) {
    const double pi = detail::sigmoid(z[0]);
    const double gamma = detail::sigmoid(z[1]);
    const double val = detail::zib_nll(suff, pi, gamma);
    if (want) {
      g.resize(2);
      h.resize(4);
      const auto [dpi, dgamma] = detail::zib_nll_grad(suff, pi, gamma);
      const auto hess = detail::zib_nll_hess(suff, pi, gamma);
      const double tp = pi * (1.0 - pi), tg = gamma * (1.0 - gamma);
      g[0] = dpi * tp;
      g[1] = dgamma * tg;
      h[0] = hess.h11 * tp * tp + dpi * tp * (1.0 - 2.0 * pi);
      h[1] = h[2] = hess.h12 * tp * tg;
      h[3] = hess.h22 * tg * tg + dgamma * tg * (1.0 - 2.0 * gamma);
    }
    return val;
  };
  auto res = detail::newton_within_clamps(fgh, {detail::logit(pi0), detail::logit(gamma0)},
                                          {-bound, -bound}, {bound, bound}, false);
  return {detail::sigmoid(res.x[0]), detail::sigmoid(res.x[1])};
}

// Per-variable beta-binomial likelihood maximization on the log scale.
std::pair<double, double> fit_betabin_variable(const VariableData& v) {
  const auto suff = detail::betabin_suff(v);
  const auto [a0, b0] = detail::betabin_start(suff);
  const double lo = detail::log_shape_lo(), hi = detail::log_shape_hi();
  auto fgh = [&](const std::vector<double>& z, std::vector<double>& g,
                 std::vector<double>& h, bool want) {
    const double alpha = std::exp(z[0]);
    const double beta = std::exp(z[1]);
    const double val = detail::betabin_nll(suff, alpha, beta);
    if (want) {
      g.resize(2);
      h.resize(4);
      const auto [da, db] = detail::betabin_nll_grad(suff, alpha, beta);
      const auto hess = detail::betabin_nll_hess(suff, alpha, beta);
      g[0] = da * alpha;
      g[1] = db * beta;
      h[0] = hess.h11 * alpha * alpha + da * alpha;
      h[1] = h[2] = hess.h12 * alpha * beta;
      h[3] = hess.h22 * beta * beta + db * beta;
    }
    return val;
  };
  auto res = detail::newton_within_clamps(fgh, {std::log(a0), std::log(b0)},
                                          {lo, lo}, {hi, hi}, true);
  return {std::exp(res.x[0]), std::exp(res.x[1])};
}

}  // namespace

MleResult mle_fit(ModelFamily family, const CountDataset& data) {
  data.validate();
  const std::size_t n_vars = data.size();
  MleResult out;
  out.degenerate.resize(n_vars, false);
  std::vector<double> par1(n_vars), par2(n_vars);

  for (std::size_t i = 0; i < n_vars; ++i) {
    const auto& v = data.variables[i];
    bool all_zero = false;
    out.degenerate[i] = all_at_boundary(v, all_zero);

    switch (family) {
      case ModelFamily::Binomial: {
        const auto s = detail::binom_suff(v);
        par1[i] = s.successes / s.total_trials;  // exact, may be 0 or 1
        break;
      }
      case ModelFamily::Zib: {
        const auto [pi, gamma] = fit_zib_variable(v);
        par1[i] = pi;
        par2[i] = gamma;
        break;
      }
      case ModelFamily::BetaBinomial: {
        const auto [alpha, beta] = fit_betabin_variable(v);
        par1[i] = alpha;
        par2[i] = beta;
        break;
      }
    }
  }

  switch (family) {
    case ModelFamily::Binomial:
      out.params = ModelParams::binomial(std::move(par1));
      break;
    case ModelFamily::Zib:
      out.params = ModelParams::zib(std::move(par1), std::move(par2));
      break;
    case ModelFamily::BetaBinomial:
      out.params = ModelParams::beta_binomial(std::move(par1), std::move(par2));
      break;
  }
  return out;
}

}  // namespace shrinkcount

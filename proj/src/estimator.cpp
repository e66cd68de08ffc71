#include "shrinkcount/estimator.hpp"

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

using detail::clamp_prob;
using detail::clamp_shape;
using detail::kProbMin;
using detail::logit;
using detail::sigmoid;

constexpr double kInf = std::numeric_limits<double>::infinity();

// One coordinate of a p-based separable penalty, with derivatives in p.
double pen_term(PenaltyKind kind, double kappa, double p) {
  switch (kind) {
    case PenaltyKind::None: return 0.0;
    case PenaltyKind::L1Zero: return p;
    case PenaltyKind::L2Zero: return p * p;
    case PenaltyKind::LogBarrier: return -std::log1p(-p);
    case PenaltyKind::LogGreedy: return std::log(p);
    case PenaltyKind::Kappa:
      return -(kappa * std::log(p) + (1.0 - kappa) * std::log1p(-p));
    default:
      throw std::logic_error("pen_term: not a separable kind");
  }
}

double pen_term_dp(PenaltyKind kind, double kappa, double p) {
  switch (kind) {
    case PenaltyKind::None: return 0.0;
    case PenaltyKind::L1Zero: return 1.0;
    case PenaltyKind::L2Zero: return 2.0 * p;
    case PenaltyKind::LogBarrier: return 1.0 / (1.0 - p);
    case PenaltyKind::LogGreedy: return 1.0 / p;
    case PenaltyKind::Kappa: return -kappa / p + (1.0 - kappa) / (1.0 - p);
    default:
      throw std::logic_error("pen_term_dp: not a separable kind");
  }
}

double pen_term_d2p(PenaltyKind kind, double kappa, double p) {
  switch (kind) {
    case PenaltyKind::None:
    case PenaltyKind::L1Zero: return 0.0;
    case PenaltyKind::L2Zero: return 2.0;
    case PenaltyKind::LogBarrier: return 1.0 / ((1.0 - p) * (1.0 - p));
    case PenaltyKind::LogGreedy: return -1.0 / (p * p);
    case PenaltyKind::Kappa:
      return kappa / (p * p) + (1.0 - kappa) / ((1.0 - p) * (1.0 - p));
    default:
      throw std::logic_error("pen_term_d2p: not a separable kind");
  }
}

bool has_closed_form(PenaltyKind kind) {
  return kind == PenaltyKind::L1Zero || kind == PenaltyKind::LogBarrier ||
         kind == PenaltyKind::LogGreedy || kind == PenaltyKind::Kappa;
}

// First and second derivatives of p_i with respect to the variable's natural
// parameter pair.
struct ProportionChain {
  double j1 = 1.0, j2 = 0.0;              // dp/dpar1, dp/dpar2
  double s11 = 0.0, s12 = 0.0, s22 = 0.0;  // second derivatives
};

ProportionChain proportion_chain(ModelFamily family, double par1, double par2) {
  ProportionChain c;
  if (family == ModelFamily::Zib) {
    c.j1 = 1.0 - par2;
    c.j2 = -par1;
    c.s12 = -1.0;
  } else if (family == ModelFamily::BetaBinomial) {
    const double total = par1 + par2;
    const double t2 = total * total, t3 = t2 * total;
    c.j1 = par2 / t2;
    c.j2 = -par1 / t2;
    c.s11 = -2.0 * par2 / t3;
    c.s12 = (par1 - par2) / t3;
    c.s22 = 2.0 * par1 / t3;
  }
  return c;
}

// Default starting values: the per-variable (clamped) MLE. For the binomial
// this is exact; otherwise it is the single-variable likelihood fit.
ModelParams default_start(ModelFamily family, const CountDataset& data) {
  MleResult mle = mle_fit(family, data);
  if (family == ModelFamily::Binomial) {
    for (auto& p : mle.params.par1) p = clamp_prob(p);
  }
  return std::move(mle.params);
}

struct NumericFit {
  ModelParams params;
  bool converged = true;
  int iterations = 0;
  std::vector<bool> boundary;
};

// Joint or per-variable minimization, depending on penalty separability.
// Works on transformed coordinates (logit for probabilities, log for alpha
// and beta) with analytic gradients and Hessians.
NumericFit fit_numeric(ModelFamily family, const PenaltySpec& penalty, double lambda,
                       const CountDataset& data, const ModelParams& start) {
  const std::size_t n_vars = data.size();
  const bool two_cols = family != ModelFamily::Binomial;
  const double pbound = detail::logit_bound();
  const double slo = detail::log_shape_lo(), shi = detail::log_shape_hi();
  const bool log_scale = family == ModelFamily::BetaBinomial;

  const std::size_t cols = two_cols ? 2 : 1;
  const std::size_t dim = n_vars * cols;
  std::vector<double> z0(dim), lo(dim), hi(dim);
  for (std::size_t i = 0; i < n_vars; ++i) {
    if (family == ModelFamily::BetaBinomial) {
      z0[2 * i] = std::log(clamp_shape(start.par1[i]));
      z0[2 * i + 1] = std::log(clamp_shape(start.par2[i]));
      lo[2 * i] = lo[2 * i + 1] = slo;
      hi[2 * i] = hi[2 * i + 1] = shi;
    } else if (family == ModelFamily::Zib) {
      z0[2 * i] = logit(clamp_prob(start.par1[i]));
      z0[2 * i + 1] = logit(clamp_prob(start.par2[i]));
      lo[2 * i] = lo[2 * i + 1] = -pbound;
      hi[2 * i] = hi[2 * i + 1] = pbound;
    } else {
      z0[i] = logit(clamp_prob(start.par1[i]));
      lo[i] = -pbound;
      hi[i] = pbound;
    }
  }

  std::vector<detail::BinomSuff> bs;
  std::vector<detail::ZibSuff> zs;
  std::vector<detail::BetaBinSuff> bbs;
  for (const auto& v : data.variables) {
    switch (family) {
      case ModelFamily::Binomial: bs.push_back(detail::binom_suff(v)); break;
      case ModelFamily::Zib: zs.push_back(detail::zib_suff(v)); break;
      case ModelFamily::BetaBinomial: bbs.push_back(detail::betabin_suff(v)); break;
    }
  }

  auto natural = [&](double z) { return log_scale ? std::exp(z) : sigmoid(z); };
  // dtheta/dz and d2theta/dz2 for the two transforms
  auto d1 = [&](double theta) { return log_scale ? theta : theta * (1.0 - theta); };
  auto d2 = [&](double theta) {
    return log_scale ? theta : theta * (1.0 - theta) * (1.0 - 2.0 * theta);
  };

  auto family_nll = [&](std::size_t i, double a, double b) {
    switch (family) {
      case ModelFamily::Binomial: return detail::binom_nll(bs[i], a);
      case ModelFamily::Zib: return detail::zib_nll(zs[i], a, b);
      default: return detail::betabin_nll(bbs[i], a, b);
    }
  };

  NumericFit out;
  out.boundary.assign(n_vars, false);
  const NewtonOptions opts;  // contract tolerances

  if (penalty_is_separable(penalty.kind)) {
    out.params.family = family;
    out.params.par1.resize(n_vars);
    out.params.par2.resize(two_cols ? n_vars : 0);

    for (std::size_t i = 0; i < n_vars; ++i) {
      NewtonResult r;
      if (!two_cols) {
        auto fgh = [&](const std::vector<double>& z, std::vector<double>& g,
                       std::vector<double>& h, bool want) {
          const double p = sigmoid(z[0]);
          const double val =
              detail::binom_nll(bs[i], p) + lambda * pen_term(penalty.kind, penalty.kappa, p);
          if (want) {
            g.resize(1);
            h.resize(1);
            const double gn = detail::binom_nll_dp(bs[i], p) +
                              lambda * pen_term_dp(penalty.kind, penalty.kappa, p);
            const double hn = detail::binom_nll_d2p(bs[i], p) +
                              lambda * pen_term_d2p(penalty.kind, penalty.kappa, p);
            const double tp = p * (1.0 - p);
            g[0] = gn * tp;
            h[0] = hn * tp * tp + gn * tp * (1.0 - 2.0 * p);
          }
          return val;
        };
        r = detail::newton_within_clamps(fgh, {z0[i]}, {lo[i]}, {hi[i]}, false, opts);
        out.params.par1[i] = sigmoid(r.x[0]);
        out.boundary[i] = std::abs(r.x[0]) >= pbound - 1e-9;
      } else {
        auto fgh = [&](const std::vector<double>& z, std::vector<double>& g,
                       std::vector<double>& h, bool want) {
          const double a = natural(z[0]);
          const double b = natural(z[1]);
          const auto chain = proportion_chain(family, a, b);
          const double p = family == ModelFamily::Zib ? a * (1.0 - b) : a / (a + b);
          const double val =
              family_nll(i, a, b) + lambda * pen_term(penalty.kind, penalty.kappa, p);
          if (want) {
            g.resize(2);
            h.resize(4);
            double ga, gb;
            detail::Hess2 hn;
            if (family == ModelFamily::Zib) {
              std::tie(ga, gb) = detail::zib_nll_grad(zs[i], a, b);
              hn = detail::zib_nll_hess(zs[i], a, b);
            } else {
              std::tie(ga, gb) = detail::betabin_nll_grad(bbs[i], a, b);
              hn = detail::betabin_nll_hess(bbs[i], a, b);
            }
            const double pd = lambda * pen_term_dp(penalty.kind, penalty.kappa, p);
            const double pdd = lambda * pen_term_d2p(penalty.kind, penalty.kappa, p);
            ga += pd * chain.j1;
            gb += pd * chain.j2;
            hn.h11 += pdd * chain.j1 * chain.j1 + pd * chain.s11;
            hn.h12 += pdd * chain.j1 * chain.j2 + pd * chain.s12;
            hn.h22 += pdd * chain.j2 * chain.j2 + pd * chain.s22;
            const double ta = d1(a), tb = d1(b);
            g[0] = ga * ta;
            g[1] = gb * tb;
            h[0] = hn.h11 * ta * ta + ga * d2(a);
            h[1] = h[2] = hn.h12 * ta * tb;
            h[3] = hn.h22 * tb * tb + gb * d2(b);
          }
          return val;
        };
        r = detail::newton_within_clamps(fgh, {z0[2 * i], z0[2 * i + 1]},
                                         {lo[2 * i], lo[2 * i + 1]},
                                         {hi[2 * i], hi[2 * i + 1]}, log_scale, opts);
        out.params.par1[i] = natural(r.x[0]);
        out.params.par2[i] = natural(r.x[1]);
        out.boundary[i] = r.x[0] <= lo[2 * i] + 1e-9 || r.x[0] >= hi[2 * i] - 1e-9 ||
                          r.x[1] <= lo[2 * i + 1] + 1e-9 || r.x[1] >= hi[2 * i + 1] - 1e-9;
      }
      out.converged = out.converged && r.converged;
      out.iterations += r.iterations;
    }
    return out;
  }

  // Coupled penalty: one joint Newton problem over all variables.
  ModelParams work;
  work.family = family;
  work.par1.resize(n_vars);
  work.par2.resize(two_cols ? n_vars : 0);
  std::vector<double> dpen1, dpen2, hpen;

  auto fgh = [&](const std::vector<double>& z, std::vector<double>& g,
                 std::vector<double>& h, bool want) {
    for (std::size_t i = 0; i < n_vars; ++i) {
      work.par1[i] = natural(z[cols * i]);
      if (two_cols) work.par2[i] = natural(z[2 * i + 1]);
    }
    double val = lambda == 0.0 ? 0.0 : lambda * penalty_value(penalty, work);
    for (std::size_t i = 0; i < n_vars; ++i)
      val += family_nll(i, work.par1[i], two_cols ? work.par2[i] : 0.0);
    if (!want) return val;

    g.assign(dim, 0.0);
    h.assign(dim * dim, 0.0);
    penalty_gradient(penalty, work, dpen1, dpen2);
    penalty_hessian(penalty, work, hpen);
    // natural-space gradient and Hessian (penalty part first)
    for (std::size_t j = 0; j < dim * dim; ++j) h[j] = lambda * hpen[j];
    for (std::size_t i = 0; i < n_vars; ++i) {
      if (!two_cols) {
        const double p = work.par1[i];
        g[i] = detail::binom_nll_dp(bs[i], p) + lambda * dpen1[i];
        h[i * dim + i] += detail::binom_nll_d2p(bs[i], p);
      } else {
        double ga, gb;
        detail::Hess2 hn;
        if (family == ModelFamily::Zib) {
          std::tie(ga, gb) = detail::zib_nll_grad(zs[i], work.par1[i], work.par2[i]);
          hn = detail::zib_nll_hess(zs[i], work.par1[i], work.par2[i]);
        } else {
          std::tie(ga, gb) = detail::betabin_nll_grad(bbs[i], work.par1[i], work.par2[i]);
          hn = detail::betabin_nll_hess(bbs[i], work.par1[i], work.par2[i]);
        }
        g[2 * i] = ga + lambda * dpen1[i];
        g[2 * i + 1] = gb + lambda * dpen2[i];
        h[(2 * i) * dim + (2 * i)] += hn.h11;
        h[(2 * i) * dim + (2 * i + 1)] += hn.h12;
        h[(2 * i + 1) * dim + (2 * i)] += hn.h12;
        h[(2 * i + 1) * dim + (2 * i + 1)] += hn.h22;
      }
    }
    // transform to the working scale
    std::vector<double> tp(dim), ts(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const double theta = natural(z[j]);
      tp[j] = d1(theta);
      ts[j] = d2(theta);
    }
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = 0; k < dim; ++k) h[j * dim + k] *= tp[j] * tp[k];
      h[j * dim + j] += g[j] * ts[j];
      g[j] *= tp[j];
    }
    return val;
  };

  auto r = detail::newton_within_clamps(fgh, z0, lo, hi, log_scale, opts);
  out.params.family = family;
  out.params.par1.resize(n_vars);
  out.params.par2.resize(two_cols ? n_vars : 0);
  for (std::size_t i = 0; i < n_vars; ++i) {
    out.params.par1[i] = natural(r.x[cols * i]);
    if (two_cols) out.params.par2[i] = natural(r.x[2 * i + 1]);
  }
  out.converged = r.converged;
  out.iterations = r.iterations;
  for (std::size_t i = 0; i < n_vars; ++i) {
    bool at_edge = false;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t j = cols * i + c;
      at_edge = at_edge || r.x[j] <= lo[j] + 1e-9 || r.x[j] >= hi[j] - 1e-9;
    }
    out.boundary[i] = at_edge;
  }
  return out;
}

}  // namespace

double penalized_objective(ModelFamily family, const PenaltySpec& penalty, double lambda,
                           const ModelParams& params, const CountDataset& data) {
  if (params.family != family)
    throw FamilyMismatchError("penalized_objective: params family mismatch");
  if (lambda < 0.0) throw std::invalid_argument("penalized_objective: lambda < 0");
  const double nll = -log_likelihood(params, data);
  if (nll == kInf) return kInf;  // zero-probability data dominates
  if (lambda == 0.0) return nll;
  return nll + lambda * penalty_value(penalty, params);
}

std::vector<double> closed_form_binomial(const PenaltySpec& penalty,
                                         const CountDataset& data, double lambda) {
  data.validate();
  penalty.validate(ModelFamily::Binomial);
  if (lambda < 0.0) throw std::invalid_argument("closed_form_binomial: lambda < 0");
  if (!has_closed_form(penalty.kind))
    throw UnsupportedPenaltyError("closed_form_binomial: no exact solution for this penalty");

  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto s = detail::binom_suff(data.variables[i]);
    const double x = s.successes;
    const double big_n = s.total_trials;  // aggregated trial count
    const double phat = x / big_n;
    switch (penalty.kind) {
      case PenaltyKind::L1Zero: {
        if (lambda == 0.0) {
          out[i] = phat;
        } else {
          const double li = lambda / big_n;
          const double disc =
              std::max(0.0, 1.0 - 4.0 * li * phat / ((li + 1.0) * (li + 1.0)));
          out[i] = 0.5 * ((li + 1.0) / li) * (1.0 - std::sqrt(disc));
        }
        break;
      }
      case PenaltyKind::LogBarrier:
        out[i] = x / (big_n + lambda);
        break;
      case PenaltyKind::LogGreedy:
        out[i] = lambda >= x ? 0.0 : (x - lambda) / (big_n - lambda);
        break;
      case PenaltyKind::Kappa:
        out[i] = (x + lambda * penalty.kappa) / (big_n + lambda);
        break;
      default:
        break;  // unreachable
    }
  }
  return out;
}

FitResult fit_penalized(ModelFamily family, const PenaltySpec& penalty, double lambda,
                        const CountDataset& data, const ModelParams* init,
                        bool allow_closed_form) {
  data.validate();
  penalty.validate(family);
  if (lambda < 0.0) throw std::invalid_argument("fit_penalized: lambda < 0");
  if (init) {
    init->validate();
    if (init->family != family)
      throw FamilyMismatchError("fit_penalized: init family mismatch");
    if (init->size() != data.size())
      throw std::invalid_argument("fit_penalized: init size mismatch");
  }

  FitResult res;
  if (family == ModelFamily::Binomial && allow_closed_form &&
      (penalty.kind == PenaltyKind::None || lambda == 0.0)) {
    // The objective reduces to the bare likelihood; the MLE is exact.
    std::vector<double> phat(data.size());
    res.boundary_flags.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto s = detail::binom_suff(data.variables[i]);
      const double p = s.successes / s.total_trials;
      phat[i] = clamp_prob(p);
      res.boundary_flags[i] = p <= kProbMin || p >= 1.0 - kProbMin;
    }
    res.params = ModelParams::binomial(std::move(phat));
    res.converged = true;
    res.iterations = 0;
    res.objective = penalized_objective(family, penalty, lambda, res.params, data);
    return res;
  }
  if (family == ModelFamily::Binomial && has_closed_form(penalty.kind) &&
      allow_closed_form) {
    const std::vector<double> exact = closed_form_binomial(penalty, data, lambda);
    std::vector<double> clamped(exact.size());
    res.boundary_flags.resize(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
      clamped[i] = clamp_prob(exact[i]);
      res.boundary_flags[i] = exact[i] <= kProbMin || exact[i] >= 1.0 - kProbMin;
    }
    res.params = ModelParams::binomial(std::move(clamped));
    res.converged = true;
    res.iterations = 0;
    res.objective = penalized_objective(family, penalty, lambda, res.params, data);
    return res;
  }

  if (penalty.kind == PenaltyKind::LogGreedy && family != ModelFamily::Binomial &&
      lambda > 0.0)
    throw UnsupportedPenaltyError(
        "LogGreedy is only available for the binomial family; its objective is "
        "unbounded below in the interior for the other families");

  const ModelParams start = init ? *init : default_start(family, data);
  NumericFit nf = fit_numeric(family, penalty, lambda, data, start);
  res.params = std::move(nf.params);
  res.converged = nf.converged;
  res.iterations = nf.iterations;
  res.boundary_flags = std::move(nf.boundary);
  res.objective = penalized_objective(family, penalty, lambda, res.params, data);
  return res;
}

FitResult fit_penalized(const FitRequest& req) {
  return fit_penalized(req.family, req.penalty, req.lambda, req.data,
                       req.init ? &*req.init : nullptr, req.allow_closed_form);
}

std::vector<FitResult> regularization_path(ModelFamily family, const PenaltySpec& penalty,
                                           const std::vector<double>& lambdas,
                                           const CountDataset& data) {
  for (std::size_t k = 1; k < lambdas.size(); ++k)
    if (!(lambdas[k] >= lambdas[k - 1]))
      throw std::invalid_argument("regularization_path: lambdas must ascend");

  std::vector<FitResult> out;
  out.reserve(lambdas.size());
  const ModelParams* warm = nullptr;
  for (double lambda : lambdas) {
    out.push_back(fit_penalized(family, penalty, lambda, data, warm));
    warm = &out.back().params;
  }
  return out;
}

}  // namespace shrinkcount

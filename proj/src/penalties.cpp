#include "shrinkcount/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shrinkcount/errors.hpp"
#include "shrinkcount/special.hpp"
#include "family_nll.hpp"

namespace shrinkcount {

namespace {

double pairwise_sq(const std::vector<double>& v) {
  double total = 0.0;
  for (double a : v)
    for (double b : v) total += (a - b) * (a - b);
  return total;
}

// d/dv_i of pairwise_sq = 4 (I v_i - sum v)
void pairwise_sq_grad(const std::vector<double>& v, std::vector<double>& g) {
  double sum = 0.0;
  for (double a : v) sum += a;
  const double n = static_cast<double>(v.size());
  g.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) g[i] = 4.0 * (n * v[i] - sum);
}

}  // namespace

void PenaltySpec::validate(ModelFamily family) const {
  if (kind == PenaltyKind::Kappa && !(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("PenaltySpec: kappa must be in (0, 1)");
  if (kind == PenaltyKind::FullZib && family != ModelFamily::Zib)
    throw FamilyMismatchError("full shrinkage on (pi, gamma) requires the zib family");
  if (kind == PenaltyKind::FullBetaBinomial && family != ModelFamily::BetaBinomial)
    throw FamilyMismatchError("full shrinkage on (alpha, beta) requires the betabin family");
}

double penalty_value(const PenaltySpec& spec, const ModelParams& params) {
  spec.validate(params.family);
  switch (spec.kind) {
    case PenaltyKind::None:
      return 0.0;
    case PenaltyKind::FullZib:
    case PenaltyKind::FullBetaBinomial:
      return pairwise_sq(params.par2) + pairwise_sq(params.par1);
    default:
      break;
  }

  const std::vector<double> p = mean_proportion(params);
  double total = 0.0;
  switch (spec.kind) {
    case PenaltyKind::L1Zero:
      for (double pi : p) total += pi;
      return total;
    case PenaltyKind::L2Zero:
      for (double pi : p) total += pi * pi;
      return total;
    case PenaltyKind::LogBarrier:
      for (double pi : p) total -= std::log1p(-pi);
      return total;
    case PenaltyKind::LogGreedy:
      for (double pi : p) total += std::log(pi);
      return total;
    case PenaltyKind::Kappa:
      for (double pi : p)
        total -= spec.kappa * std::log(pi) + (1.0 - spec.kappa) * std::log1p(-pi);
      return total;
    case PenaltyKind::MeanL2:
      return pairwise_sq(p);
    case PenaltyKind::MeanQ2: {
      std::vector<double> q(p.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        q[i] = inverse_normal_cdf(detail::clamp_prob(p[i]));
      return pairwise_sq(q);
    }
    default:
      throw std::logic_error("penalty_value: unhandled kind");
  }
}

void penalty_gradient(const PenaltySpec& spec, const ModelParams& params,
                      std::vector<double>& d_par1, std::vector<double>& d_par2) {
  spec.validate(params.family);
  const std::size_t n = params.size();
  const bool two_cols = params.family != ModelFamily::Binomial;
  d_par1.assign(n, 0.0);
  d_par2.assign(two_cols ? n : 0, 0.0);

  if (spec.kind == PenaltyKind::None) return;

  if (spec.kind == PenaltyKind::FullZib || spec.kind == PenaltyKind::FullBetaBinomial) {
    pairwise_sq_grad(params.par1, d_par1);
    pairwise_sq_grad(params.par2, d_par2);
    return;
  }

  // p-based kinds: dPen/dp first, then the chain rule into (par1, par2).
  const std::vector<double> p = mean_proportion(params);
  std::vector<double> dp(n, 0.0);
  switch (spec.kind) {
    case PenaltyKind::L1Zero:
      for (auto& g : dp) g = 1.0;
      break;
    case PenaltyKind::L2Zero:
      for (std::size_t i = 0; i < n; ++i) dp[i] = 2.0 * p[i];
      break;
    case PenaltyKind::LogBarrier:
      for (std::size_t i = 0; i < n; ++i) dp[i] = 1.0 / (1.0 - p[i]);
      break;
    case PenaltyKind::LogGreedy:
      for (std::size_t i = 0; i < n; ++i) dp[i] = 1.0 / p[i];
      break;
    case PenaltyKind::Kappa:
      for (std::size_t i = 0; i < n; ++i)
        dp[i] = -spec.kappa / p[i] + (1.0 - spec.kappa) / (1.0 - p[i]);
      break;
    case PenaltyKind::MeanL2:
      pairwise_sq_grad(p, dp);
      break;
    case PenaltyKind::MeanQ2: {
      std::vector<double> q(n);
      for (std::size_t i = 0; i < n; ++i)
        q[i] = inverse_normal_cdf(detail::clamp_prob(p[i]));
      std::vector<double> dq;
      pairwise_sq_grad(q, dq);
      for (std::size_t i = 0; i < n; ++i) {
        // dq/dp = 1/phi(q); zero outside the clamp range, where the value is flat
        if (p[i] <= detail::kProbMin || p[i] >= 1.0 - detail::kProbMin) {
          dp[i] = 0.0;
        } else {
          dp[i] = dq[i] / normal_pdf(q[i]);
        }
      }
      break;
    }
    default:
      throw std::logic_error("penalty_gradient: unhandled kind");
  }

  switch (params.family) {
    case ModelFamily::Binomial:
      d_par1 = dp;
      break;
    case ModelFamily::Zib:
      for (std::size_t i = 0; i < n; ++i) {
        d_par1[i] = dp[i] * (1.0 - params.par2[i]);  // dp/dpi
        d_par2[i] = -dp[i] * params.par1[i];         // dp/dgamma
      }
      break;
    case ModelFamily::BetaBinomial:
      for (std::size_t i = 0; i < n; ++i) {
        const double total = params.par1[i] + params.par2[i];
        d_par1[i] = dp[i] * params.par2[i] / (total * total);
        d_par2[i] = -dp[i] * params.par1[i] / (total * total);
      }
      break;
  }
}

void penalty_hessian(const PenaltySpec& spec, const ModelParams& params,
                     std::vector<double>& hess) {
  spec.validate(params.family);
  const std::size_t n = params.size();
  const bool two_cols = params.family != ModelFamily::Binomial;
  const std::size_t cols = two_cols ? 2 : 1;
  const std::size_t dim = n * cols;
  hess.assign(dim * dim, 0.0);

  if (spec.kind == PenaltyKind::None) return;

  if (spec.kind == PenaltyKind::FullZib || spec.kind == PenaltyKind::FullBetaBinomial) {
    // Pairwise squares act on each natural column independently:
    // d2/dv_i dv_j = 4 (n delta_ij - 1).
    for (std::size_t col = 0; col < 2; ++col) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          hess[(2 * i + col) * dim + (2 * j + col)] =
              4.0 * ((i == j ? static_cast<double>(n) : 0.0) - 1.0);
        }
      }
    }
    return;
  }

  // p-based kinds: Hessian in p-space first.
  const std::vector<double> p = mean_proportion(params);
  std::vector<double> dp(n, 0.0);          // dPen/dp_i
  std::vector<double> hp(n * n, 0.0);      // d2Pen/dp_i dp_j
  switch (spec.kind) {
    case PenaltyKind::L1Zero:
      for (auto& g : dp) g = 1.0;
      break;
    case PenaltyKind::L2Zero:
      for (std::size_t i = 0; i < n; ++i) {
        dp[i] = 2.0 * p[i];
        hp[i * n + i] = 2.0;
      }
      break;
    case PenaltyKind::LogBarrier:
      for (std::size_t i = 0; i < n; ++i) {
        const double q = 1.0 - p[i];
        dp[i] = 1.0 / q;
        hp[i * n + i] = 1.0 / (q * q);
      }
      break;
    case PenaltyKind::LogGreedy:
      for (std::size_t i = 0; i < n; ++i) {
        dp[i] = 1.0 / p[i];
        hp[i * n + i] = -1.0 / (p[i] * p[i]);
      }
      break;
    case PenaltyKind::Kappa:
      for (std::size_t i = 0; i < n; ++i) {
        const double q = 1.0 - p[i];
        dp[i] = -spec.kappa / p[i] + (1.0 - spec.kappa) / q;
        hp[i * n + i] = spec.kappa / (p[i] * p[i]) + (1.0 - spec.kappa) / (q * q);
      }
      break;
    case PenaltyKind::MeanL2: {
      pairwise_sq_grad(p, dp);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          hp[i * n + j] = 4.0 * ((i == j ? static_cast<double>(n) : 0.0) - 1.0);
      break;
    }
    case PenaltyKind::MeanQ2: {
      std::vector<double> q(n), dq_dp(n), d2q_dp2(n), gq;
      for (std::size_t i = 0; i < n; ++i) {
        const double pc = detail::clamp_prob(p[i]);
        q[i] = inverse_normal_cdf(pc);
        const double phi = normal_pdf(q[i]);
        const bool interior = p[i] > detail::kProbMin && p[i] < 1.0 - detail::kProbMin;
        dq_dp[i] = interior ? 1.0 / phi : 0.0;
        d2q_dp2[i] = interior ? q[i] / (phi * phi) : 0.0;
      }
      pairwise_sq_grad(q, gq);  // dPen/dq
      for (std::size_t i = 0; i < n; ++i) {
        dp[i] = gq[i] * dq_dp[i];
        for (std::size_t j = 0; j < n; ++j) {
          const double hq = 4.0 * ((i == j ? static_cast<double>(n) : 0.0) - 1.0);
          hp[i * n + j] = dq_dp[i] * dq_dp[j] * hq;
        }
        hp[i * n + i] += gq[i] * d2q_dp2[i];
      }
      break;
    }
    default:
      throw std::logic_error("penalty_hessian: unhandled kind");
  }

  if (params.family == ModelFamily::Binomial) {
    hess = hp;
    return;
  }

  // Chain p -> (par1, par2): H = J^T Hp J + sum_i dPen/dp_i * hess(p_i).
  // J is block diagonal, one row per variable.
  std::vector<double> j1(n), j2(n);        // dp_i/dpar1_i, dp_i/dpar2_i
  std::vector<double> s11(n), s12(n), s22(n);  // second derivatives of p_i
  for (std::size_t i = 0; i < n; ++i) {
    if (params.family == ModelFamily::Zib) {
      const double pi = params.par1[i], gamma = params.par2[i];
      j1[i] = 1.0 - gamma;
      j2[i] = -pi;
      s11[i] = 0.0;
      s12[i] = -1.0;
      s22[i] = 0.0;
    } else {
      const double alpha = params.par1[i], beta = params.par2[i];
      const double total = alpha + beta;
      const double t3 = total * total * total;
      j1[i] = beta / (total * total);
      j2[i] = -alpha / (total * total);
      s11[i] = -2.0 * beta / t3;
      s12[i] = (alpha - beta) / t3;
      s22[i] = 2.0 * alpha / t3;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double hpij = hp[i * n + j];
      if (hpij != 0.0) {
        hess[(2 * i) * dim + (2 * j)] += j1[i] * j1[j] * hpij;
        hess[(2 * i) * dim + (2 * j + 1)] += j1[i] * j2[j] * hpij;
        hess[(2 * i + 1) * dim + (2 * j)] += j2[i] * j1[j] * hpij;
        hess[(2 * i + 1) * dim + (2 * j + 1)] += j2[i] * j2[j] * hpij;
      }
    }
    hess[(2 * i) * dim + (2 * i)] += dp[i] * s11[i];
    hess[(2 * i) * dim + (2 * i + 1)] += dp[i] * s12[i];
    hess[(2 * i + 1) * dim + (2 * i)] += dp[i] * s12[i];
    hess[(2 * i + 1) * dim + (2 * i + 1)] += dp[i] * s22[i];
  }
}

std::string penalty_name(const PenaltySpec& spec) {
  switch (spec.kind) {
    case PenaltyKind::None: return "none";
    case PenaltyKind::L1Zero: return "pen1";
    case PenaltyKind::L2Zero: return "pen2";
    case PenaltyKind::LogBarrier: return "pen3";
    case PenaltyKind::LogGreedy: return "pen4";
    case PenaltyKind::Kappa: return "pen5";
    case PenaltyKind::MeanL2: return "mean-l2";
    case PenaltyKind::MeanQ2: return "mean-q2";
    case PenaltyKind::FullZib:
    case PenaltyKind::FullBetaBinomial: return "full";
  }
  return "?";
}

bool penalty_is_separable(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::None:
    case PenaltyKind::L1Zero:
    case PenaltyKind::L2Zero:
    case PenaltyKind::LogBarrier:
    case PenaltyKind::LogGreedy:
    case PenaltyKind::Kappa:
      return true;
    default:
      return false;
  }
}

}  // namespace shrinkcount

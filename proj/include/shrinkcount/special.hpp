#pragma once

namespace shrinkcount {

// log C(n, k) via log-gamma; valid for 0 <= k <= n.
double log_choose(int n, int k);

// log B(a, b) = lgamma(a) + lgamma(b) - lgamma(a+b), a > 0, b > 0.
double log_beta_fn(double a, double b);

// Digamma for x > 0; absolute error below 1e-12 on the ranges used here.
double digamma(double x);

// Trigamma (second derivative of log-gamma) for x > 0.
double trigamma(double x);

double normal_pdf(double z);
double normal_cdf(double z);

// Standard normal quantile. Rational approximation polished by one Halley
// step against the erfc-based CDF; absolute error <= 1e-9 on
// u in [1e-12, 1 - 1e-12]. Throws std::domain_error at u <= 0 or u >= 1.
double inverse_normal_cdf(double u);

}  // namespace shrinkcount

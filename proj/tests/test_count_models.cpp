#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "shrinkcount/count_models.hpp"
#include "shrinkcount/rng.hpp"

using namespace shrinkcount;

namespace {

// Exact binomial coefficient via Pascal's rule; fits in uint64 for the values
// used here.
std::uint64_t choose_exact(int n, int k) {
  std::vector<std::uint64_t> row(n + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = i; j >= 1; --j) row[j] += row[j - 1];
  return row[k];
}

// Composite Simpson; enough nodes that the polynomial integrands used below
// are integrated far beyond the tolerances being tested.
template <class F>
double simpson(F f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

CountDataset one_variable(int trials, std::vector<int> counts) {
  CountDataset d;
  d.variables.push_back({"A", trials, std::move(counts)});
  return d;
}

}  // namespace

TEST_CASE("binomial logpmf basics") {
  CHECK(binom_logpmf(0, 40, 0.0) == 0.0);
  CHECK(binom_logpmf(1, 2, 0.5) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(binom_logpmf(3, 40, 0.0) == -std::numeric_limits<double>::infinity());
  CHECK(binom_logpmf(40, 40, 1.0) == 0.0);
  CHECK_THROWS_AS(binom_logpmf(41, 40, 0.5), std::domain_error);
  CHECK_THROWS_AS(binom_logpmf(1, 40, 1.5), std::domain_error);
  CHECK_THROWS_AS(binom_logpmf(1, 40, -0.1), std::domain_error);
}

TEST_CASE("binomial logpmf against exact integer arithmetic") {
  const long double exact =
      std::log((long double)choose_exact(40, 20)) - 40.0L * std::log(2.0L);
  CHECK(std::abs(binom_logpmf(20, 40, 0.5) - (double)exact) <= 1e-12);
}

TEST_CASE("zib logpmf") {
  // gamma = 0 collapses to the plain binomial, exactly.
  for (int x = 0; x <= 12; ++x)
    CHECK(zib_logpmf(x, 12, 0.3, 0.0) == binom_logpmf(x, 12, 0.3));

  // pi = 1 kills the binomial zero branch.
  CHECK(zib_logpmf(0, 1, 1.0, 0.5) == doctest::Approx(std::log(0.5)).epsilon(1e-14));

  // direct high-precision evaluation of the zero atom
  const long double direct = std::log(0.2L + 0.8L * std::pow(0.95L, 40.0L));
  CHECK(std::abs(zib_logpmf(0, 40, 0.05, 0.2) - (double)direct) <= 1e-12);

  CHECK_THROWS_AS(zib_logpmf(0, 10, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(zib_logpmf(11, 10, 0.5, 0.1), std::domain_error);
}

TEST_CASE("beta-binomial logpmf") {
  // alpha = beta = 1 is uniform on {0..N}
  for (int x = 0; x <= 7; ++x)
    CHECK(betabinom_logpmf(x, 7, 1.0, 1.0) ==
          doctest::Approx(-std::log(8.0)).epsilon(1e-13));

  // single trial: P(X=1) = alpha / (alpha + beta)
  CHECK(betabinom_logpmf(1, 1, 2.5, 7.5) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-13));

  // quadrature oracle: integrate C(10,3) t^3 (1-t)^7 against the Beta(2,5) density
  const double inv_b25 = 30.0;  // 1 / B(2,5)
  auto integrand = [&](double t) {
    return choose_exact(10, 3) * std::pow(t, 3) * std::pow(1.0 - t, 7) * inv_b25 * t *
           std::pow(1.0 - t, 4);
  };
  const double integral = simpson(integrand, 0.0, 1.0, 1 << 14);
  CHECK(std::abs(std::exp(betabinom_logpmf(3, 10, 2.0, 5.0)) - integral) <= 1e-10);

  CHECK_THROWS_AS(betabinom_logpmf(1, 10, 0.0, 1.0), std::domain_error);
}

TEST_CASE("pmf normalization for all families") {
  Rng rng(20240811);
  for (int trials : {1, 5, 12}) {
    for (int rep = 0; rep < 20; ++rep) {
      const double p = 0.001 + 0.998 * rng.uniform01();
      const double gamma = 0.9 * rng.uniform01();
      const double alpha = 0.1 + 30.0 * rng.uniform01();
      const double beta = 0.1 + 30.0 * rng.uniform01();
      double sb = 0.0, sz = 0.0, sbb = 0.0;
      for (int x = 0; x <= trials; ++x) {
        sb += std::exp(binom_logpmf(x, trials, p));
        sz += std::exp(zib_logpmf(x, trials, p, gamma));
        sbb += std::exp(betabinom_logpmf(x, trials, alpha, beta));
      }
      CHECK(sb == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(sz == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(sbb == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("beta-binomial approaches the binomial as alpha+beta grows") {
  const double c = 1e6;
  for (double p : {0.1, 0.5, 0.9}) {
    for (int x = 0; x <= 40; ++x) {
      const double bb = std::exp(betabinom_logpmf(x, 40, c * p, c * (1.0 - p)));
      const double bin = std::exp(binom_logpmf(x, 40, p));
      CHECK(std::abs(bb - bin) <= 1e-4);
    }
  }
}

TEST_CASE("log likelihood") {
  // single observation: just the logpmf
  const auto d1 = one_variable(6, {2});
  const auto params1 = ModelParams::binomial({0.37});
  CHECK(log_likelihood(params1, d1) ==
        doctest::Approx(binom_logpmf(2, 6, 0.37)).epsilon(1e-14));

  // duplicated dataset doubles the log-likelihood
  CountDataset d2 = one_variable(6, {2, 5, 0});
  double base = log_likelihood(params1, d2);
  CountDataset d4 = one_variable(6, {2, 5, 0, 2, 5, 0});
  CHECK(log_likelihood(params1, d4) == doctest::Approx(2.0 * base).epsilon(1e-14));

  // hand evaluation
  CountDataset two;
  two.variables.push_back({"A", 2, {1}});
  two.variables.push_back({"B", 2, {2}});
  CHECK(log_likelihood(ModelParams::binomial({0.5, 0.5}), two) ==
        doctest::Approx(std::log(0.5) + std::log(0.25)).epsilon(1e-13));

  CHECK_THROWS_AS(log_likelihood(ModelParams::binomial({0.5}), two),
                  std::invalid_argument);
}

TEST_CASE("log likelihood permutation behavior") {
  Rng rng(7);
  CountDataset d;
  for (int i = 0; i < 4; ++i) {
    VariableData v;
    v.id = "V" + std::to_string(i);
    v.trials = 15;
    for (int j = 0; j < 9; ++j) v.counts.push_back((int)rng.uniform_below(16));
    d.variables.push_back(v);
  }
  ModelParams params = ModelParams::zib({0.2, 0.3, 0.4, 0.5}, {0.1, 0.2, 0.05, 0.3});
  const double base = log_likelihood(params, d);

  // permute observations within each variable
  CountDataset shuffled = d;
  for (auto& v : shuffled.variables) std::reverse(v.counts.begin(), v.counts.end());
  CHECK(log_likelihood(params, shuffled) == doctest::Approx(base).epsilon(1e-12));

  // permute variables together with their parameter rows
  CountDataset rotated = d;
  std::rotate(rotated.variables.begin(), rotated.variables.begin() + 1,
              rotated.variables.end());
  ModelParams rp = params;
  std::rotate(rp.par1.begin(), rp.par1.begin() + 1, rp.par1.end());
  std::rotate(rp.par2.begin(), rp.par2.begin() + 1, rp.par2.end());
  CHECK(log_likelihood(rp, rotated) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("mean proportion") {
  CHECK(mean_proportion(ModelParams::zib({0.05}, {0.0}))[0] == 0.05);
  CHECK(mean_proportion(ModelParams::beta_binomial({1.0}, {1.0}))[0] == 0.5);
  CHECK(mean_proportion(ModelParams::zib({0.0529}, {0.343}))[0] ==
        doctest::Approx(0.0529 * (1.0 - 0.343)).epsilon(1e-15));
}

TEST_CASE("binomial mle") {
  const auto zero = mle_fit(ModelFamily::Binomial, one_variable(40, {0, 0, 0}));
  CHECK(zero.params.par1[0] == 0.0);
  CHECK(zero.degenerate[0]);

  const auto half = mle_fit(ModelFamily::Binomial, one_variable(40, {10, 30}));
  CHECK(half.params.par1[0] == 0.5);
  CHECK_FALSE(half.degenerate[0]);

  // the fitted mean proportion is the empirical proportion, exactly
  Rng rng(99);
  CountDataset d;
  VariableData v;
  v.id = "A";
  v.trials = 9;
  long total = 0;
  for (int j = 0; j < 31; ++j) {
    v.counts.push_back((int)rng.uniform_below(10));
    total += v.counts.back();
  }
  d.variables.push_back(v);
  const auto fit = mle_fit(ModelFamily::Binomial, d);
  CHECK(mean_proportion(fit.params)[0] == (double)total / (31.0 * 9.0));
}

TEST_CASE("beta-binomial mle recovers simulated parameters") {
  Rng rng(20240812);
  VariableData v;
  v.id = "A";
  v.trials = 40;
  for (int j = 0; j < 5000; ++j) {
    const double t = rng.beta(2.0, 5.0);
    v.counts.push_back(rng.binomial(40, t));
  }
  CountDataset d;
  d.variables.push_back(v);
  const auto fit = mle_fit(ModelFamily::BetaBinomial, d);
  CHECK(fit.params.par1[0] == doctest::Approx(2.0).epsilon(0.10));
  CHECK(fit.params.par2[0] == doctest::Approx(5.0).epsilon(0.10));
}

TEST_CASE("zib mle on a clean mixture") {
  Rng rng(31337);
  VariableData v;
  v.id = "A";
  v.trials = 40;
  for (int j = 0; j < 4000; ++j)
    v.counts.push_back(rng.bernoulli(0.25) ? 0 : rng.binomial(40, 0.12));
  CountDataset d;
  d.variables.push_back(v);
  const auto fit = mle_fit(ModelFamily::Zib, d);
  CHECK(fit.params.par1[0] == doctest::Approx(0.12).epsilon(0.08));
  CHECK(fit.params.par2[0] == doctest::Approx(0.25).epsilon(0.08));
}

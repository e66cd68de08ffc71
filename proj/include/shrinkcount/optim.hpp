#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace shrinkcount {

struct NewtonOptions {
  int max_iterations = 10000;
  double gradient_tol = 1e-7;    // sup-norm, on the working (transformed) scale
  double objective_tol = 1e-10;  // relative decrease per accepted step
};

struct NewtonResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

namespace optim_detail {

// In-place Cholesky of a row-major symmetric matrix; false when not
// positive definite.
inline bool cholesky(std::vector<double>& m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = m[i * n + j];
      for (std::size_t k = 0; k < j; ++k) acc -= m[i * n + k] * m[j * n + k];
      if (i == j) {
        if (!(acc > 0.0) || !std::isfinite(acc)) return false;
        m[i * n + i] = std::sqrt(acc);
      } else {
        m[i * n + j] = acc / m[j * n + j];
      }
    }
  }
  return true;
}

inline void cholesky_solve(const std::vector<double>& l, std::size_t n,
                           std::vector<double>& x) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = x[i];
    for (std::size_t k = 0; k < i; ++k) acc -= l[i * n + k] * x[k];
    x[i] = acc / l[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) acc -= l[k * n + ii] * x[k];
    x[ii] = acc / l[ii * n + ii];
  }
}

}  // namespace optim_detail

// Damped Newton with backtracking line search over an axis-aligned box.
// `fgh(x, g, h, want_derivs)` returns the objective; when want_derivs is true
// it also writes the gradient (size n) and the row-major Hessian (size n*n).
// The Newton system is regularized with a growing ridge until it is positive
// definite and yields a descent direction; exact second derivatives make the
// steps insensitive to the conditioning of heavily penalized objectives.
// Convergence requires the gradient sup-norm and the relative objective
// decrease to both fall under tolerance; a stalled line search ends the run
// with converged reflecting the gradient test alone.
template <class FGH>
NewtonResult minimize_newton(FGH&& fgh, std::vector<double> x,
                             const std::vector<double>& lo,
                             const std::vector<double>& hi,
                             const NewtonOptions& opt = {}) {
  const std::size_t n = x.size();
  auto project = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < n; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
  };
  auto sup_norm = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
  };
  project(x);

  std::vector<double> g(n), h(n * n), d(n), m(n * n), xt(n), gt(n), ht(n * n);
  std::vector<double> g_unused, h_unused;
  double f = fgh(x, g, h, true);
  if (sup_norm(g) <= opt.gradient_tol) return {std::move(x), f, true, 0};

  int iter = 0;
  bool converged = false;
  while (iter < opt.max_iterations) {
    ++iter;

    // Damped solve: (H + mu I) d = -g, growing mu until usable.
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      max_diag = std::max(max_diag, std::abs(h[i * n + i]));
    double mu = 0.0;
    bool have_direction = false;
    for (int attempt = 0; attempt < 60 && !have_direction; ++attempt) {
      m = h;
      for (std::size_t i = 0; i < n; ++i) m[i * n + i] += mu;
      if (optim_detail::cholesky(m, n)) {
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
        optim_detail::cholesky_solve(m, n, d);
        double dg = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
          dg += d[i] * g[i];
          finite = finite && std::isfinite(d[i]);
        }
        if (finite && dg < 0.0) {
          have_direction = true;
          break;
        }
      }
      mu = mu == 0.0 ? std::max(1e-8 * std::max(1.0, max_diag), 1e-12) : mu * 10.0;
    }
    if (!have_direction) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    }
    double dg = 0.0;
    for (std::size_t i = 0; i < n; ++i) dg += d[i] * g[i];
    if (!(dg < 0.0)) break;

    // Full step first, with derivatives. Near the optimum the objective is
    // flat at double resolution and a value-only test cannot see progress,
    // so a clear gradient-norm reduction also counts as acceptance.
    for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + d[i];
    project(xt);
    double ft = fgh(xt, gt, ht, true);
    const double g_norm = sup_norm(g);
    bool accepted = std::isfinite(ft) &&
                    (ft <= f + 1e-4 * dg ||
                     (ft <= f + 1e-9 * (1.0 + std::abs(f)) &&
                      sup_norm(gt) <= 0.7 * g_norm));
    if (accepted) {
      const double drop = f - ft;
      x.swap(xt);
      g.swap(gt);
      h.swap(ht);
      f = ft;
      if (sup_norm(g) <= opt.gradient_tol &&
          drop <= opt.objective_tol * (1.0 + std::abs(f))) {
        converged = true;
        break;
      }
      continue;
    }

    // Backtracking on the value alone.
    double t = 0.5;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + t * d[i];
      project(xt);
      ft = fgh(xt, g_unused, h_unused, false);
      if (std::isfinite(ft) && ft <= f + 1e-4 * t * dg) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (accepted && xt == x) accepted = false;  // sub-ulp step, no movement
    if (!accepted) {
      converged = g_norm <= opt.gradient_tol;
      break;
    }

    const double drop = f - ft;
    x.swap(xt);
    f = fgh(x, g, h, true);

    if (sup_norm(g) <= opt.gradient_tol &&
        drop <= opt.objective_tol * (1.0 + std::abs(f))) {
      converged = true;
      break;
    }
  }

  return {std::move(x), f, converged, iter};
}

}  // namespace shrinkcount

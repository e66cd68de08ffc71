#include "shrinkcount/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace shrinkcount {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::vector<SummaryRow> summarize(const CountDataset& data) {
  std::vector<SummaryRow> rows;
  rows.reserve(data.size());
  for (const auto& v : data.variables) {
    SummaryRow r;
    r.id = v.id;
    r.sample_size = static_cast<int>(v.counts.size());
    r.trials = v.trials;
    std::vector<int> sorted = v.counts;
    std::sort(sorted.begin(), sorted.end());
    r.min_count = sorted.front();
    r.max_count = sorted.back();
    r.median_count = sorted[(sorted.size() - 1) / 2];  // lower median
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(const CountDataset& data, std::ostream& out) {
  out << "variable_id,sample_size,N,min,median,max\n";
  for (const auto& r : summarize(data)) {
    out << r.id << ',' << r.sample_size << ',' << r.trials << ',' << r.min_count << ','
        << r.median_count << ',' << r.max_count << '\n';
  }
}

void write_estimates_csv(const CountDataset& data, const std::vector<LabeledFit>& fits,
                         std::ostream& out) {
  if (fits.empty()) return;
  const ModelFamily family = fits.front().params.family;
  switch (family) {
    case ModelFamily::Binomial: out << "estimator,variable_id,p\n"; break;
    case ModelFamily::Zib: out << "estimator,variable_id,pi,gamma,p\n"; break;
    case ModelFamily::BetaBinomial: out << "estimator,variable_id,alpha,beta,p\n"; break;
  }
  for (const auto& fit : fits) {
    const auto p = mean_proportion(fit.params);
    for (std::size_t i = 0; i < data.size(); ++i) {
      out << fit.estimator << ',' << data.variables[i].id;
      if (family != ModelFamily::Binomial)
        out << ',' << fmt(fit.params.par1[i]) << ',' << fmt(fit.params.par2[i]);
      out << ',' << fmt(p[i]) << '\n';
    }
  }
}

void write_cv_csv(ModelFamily family, const std::vector<CvComparisonRow>& rows,
                  std::ostream& out) {
  out << "family,penalty,vfcv_score,log_lambda_opt_plus1,lambda_opt,selected\n";
  for (const auto& r : rows) {
    out << family_name(family) << ',' << r.penalty << ',' << fmt(r.best_score) << ',';
    if (r.has_lambda)
      out << fmt(std::log(r.lambda_opt + 1.0)) << ',' << fmt(r.lambda_opt);
    else
      out << ',';
    out << ',' << (r.selected ? 1 : 0) << '\n';
  }
}

void write_fit_diagnostics_csv(const VariableData& variable, ModelFamily family,
                               double par1, double par2, std::ostream& out) {
  const int max_count = *std::max_element(variable.counts.begin(), variable.counts.end());
  const int x_top = std::min(max_count + 2, variable.trials);
  const double n = static_cast<double>(variable.counts.size());

  std::vector<double> empirical(x_top + 1, 0.0);
  for (int x : variable.counts)
    if (x <= x_top) empirical[x] += 1.0 / n;

  out << "x,empirical_pmf,model_pmf,empirical_cdf,model_cdf\n";
  double ecdf = 0.0, mcdf = 0.0;
  for (int x = 0; x <= x_top; ++x) {
    const double mpmf = std::exp(family_logpmf(family, x, variable.trials, par1, par2));
    ecdf += empirical[x];
    mcdf += mpmf;
    out << x << ',' << fmt(empirical[x]) << ',' << fmt(mpmf) << ',' << fmt(ecdf) << ','
        << fmt(mcdf) << '\n';
  }
}

void write_mse_report_csv(const MSEReport& report, std::ostream& out) {
  out << "config,family,penalty,mse_ratio_p,mse_ratio_pi,mse_ratio_gamma,"
         "mse_ratio_alpha,mse_ratio_beta,ebar_x,sbar_x,K,excluded,valid\n";
  for (const auto& row : report.rows) {
    out << report.config_name << ',' << family_name(report.family) << ',' << row.penalty
        << ',' << fmt(row.ratio_p) << ',';
    const bool zib = report.family == ModelFamily::Zib;
    const bool bb = report.family == ModelFamily::BetaBinomial;
    out << (zib && row.ratio_par1 ? fmt(*row.ratio_par1) : "") << ','
        << (zib && row.ratio_par2 ? fmt(*row.ratio_par2) : "") << ','
        << (bb && row.ratio_par1 ? fmt(*row.ratio_par1) : "") << ','
        << (bb && row.ratio_par2 ? fmt(*row.ratio_par2) : "") << ',';
    out << fmt(report.mean_count) << ',' << fmt(report.sd_count) << ','
        << report.replications << ',' << report.excluded << ','
        << (report.valid ? 1 : 0) << '\n';
  }
}

void write_provenance(const SimConfig& config, const MSEReport& report, std::ostream& out) {
  out << "config = " << config.name << '\n'
      << "family = " << family_name(config.family) << '\n'
      << "shape = " << shape_name(config.primary.shape) << '\n'
      << "a = " << fmt(config.primary.lower) << '\n'
      << "b = " << fmt(config.primary.upper) << '\n';
  if (config.secondary) {
    out << "a2 = " << fmt(config.secondary->lower) << '\n'
        << "b2 = " << fmt(config.secondary->upper) << '\n';
  }
  out << "I = " << config.num_variables << '\n'
      << "N = " << config.trials << '\n'
      << "n = " << config.observations << '\n'
      << "K = " << config.replications << '\n'
      << "V = " << config.folds << '\n'
      << "seed = " << config.master_seed << '\n';
  out << "penalties =";
  for (std::size_t i = 0; i < config.penalties.size(); ++i)
    out << (i ? "," : " ") << penalty_name(config.penalties[i]);
  out << '\n';
  out << "grid_points = " << config.grid.values.size() << '\n'
      << "grid_min_positive = "
      << fmt(config.grid.values.size() > 1 ? config.grid.values[1] : 0.0) << '\n'
      << "grid_max = " << fmt(config.grid.values.back()) << '\n'
      << "excluded_replicates = " << report.excluded << '\n'
      << "valid = " << (report.valid ? 1 : 0) << '\n';
}

}  // namespace shrinkcount

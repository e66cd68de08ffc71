#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "shrinkcount/count_models.hpp"
#include "shrinkcount/dataset.hpp"
#include "shrinkcount/simulation.hpp"

namespace shrinkcount {

struct SummaryRow {
  std::string id;
  int sample_size = 0;
  int trials = 0;
  int min_count = 0;
  int median_count = 0;  // lower median for even sample sizes
  int max_count = 0;
};

std::vector<SummaryRow> summarize(const CountDataset& data);
void write_summary_csv(const CountDataset& data, std::ostream& out);

// Long-format estimates table: one row per (estimator, variable) with the
// family's natural parameters and the derived success proportion p.
struct LabeledFit {
  std::string estimator;  // e.g. "mle", "pen2", "mean-l2"
  ModelParams params;
};
void write_estimates_csv(const CountDataset& data, const std::vector<LabeledFit>& fits,
                         std::ostream& out);

// Cross-validation comparison: best score and selected shrinkage level per
// penalty, the latter reported as log(lambda_opt + 1) alongside the raw value.
struct CvComparisonRow {
  std::string penalty;
  double best_score = 0.0;
  double lambda_opt = 0.0;
  bool has_lambda = true;  // false for the unpenalized row
  bool selected = false;
};
void write_cv_csv(ModelFamily family, const std::vector<CvComparisonRow>& rows,
                  std::ostream& out);

// Per-variable empirical vs model pmf and cdf on x = 0..min(max count + 2, N).
void write_fit_diagnostics_csv(const VariableData& variable, ModelFamily family,
                               double par1, double par2, std::ostream& out);

void write_mse_report_csv(const MSEReport& report, std::ostream& out);
void write_provenance(const SimConfig& config, const MSEReport& report, std::ostream& out);

}  // namespace shrinkcount

// Command-line front end: fit, report, simulate, synth.
//
// Exit codes: 0 success, 2 input error, 3 convergence failure, 4 internal error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "shrinkcount/count_models.hpp"
#include "shrinkcount/cross_validation.hpp"
#include "shrinkcount/errors.hpp"
#include "shrinkcount/estimator.hpp"
#include "shrinkcount/io.hpp"
#include "shrinkcount/report.hpp"
#include "shrinkcount/rng.hpp"
#include "shrinkcount/simulation.hpp"
#include "shrinkcount/threading.hpp"

namespace fs = std::filesystem;
using namespace shrinkcount;

namespace {

struct FitFlags {
  std::string data_path;
  std::string family_text = "binomial";
  std::string penalty_text = "none";
  std::string lambda_text = "0";
  double kappa = 0.5;
  int folds = 10;
  std::uint64_t seed = 1;
  std::string grid_path;
  std::string out_dir;
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags, bool out_required) {
  cmd->add_option("--data", flags.data_path, "counts CSV (variable_id,N,count)")
      ->required();
  cmd->add_option("--family", flags.family_text, "binomial | zib | betabin");
  cmd->add_option("--penalty", flags.penalty_text,
                  "none|pen1|pen2|pen3|pen4|pen5|mean-l2|mean-q2|full|auto");
  cmd->add_option("--kappa", flags.kappa, "target proportion for pen5");
  cmd->add_option("--lambda", flags.lambda_text,
                  "shrinkage level (multiplied by mean sample size), or 'cv'");
  cmd->add_option("--folds", flags.folds, "folds for --lambda cv");
  cmd->add_option("--seed", flags.seed, "seed for the fold assignment");
  cmd->add_option("--grid", flags.grid_path, "lambda grid file, one value per line");
  auto* out = cmd->add_option("--out", flags.out_dir, "output directory");
  if (out_required) out->required();
}

struct FitOutcome {
  ModelFamily family = ModelFamily::Binomial;
  std::vector<LabeledFit> fits;            // mle first, then the selected penalized fit
  std::vector<CvComparisonRow> cv_rows;    // empty without --lambda cv
  bool used_cv = false;
  bool converged = true;
};

double mean_sample_size(const CountDataset& data) {
  double total = 0.0;
  for (const auto& v : data.variables) total += static_cast<double>(v.counts.size());
  return total / static_cast<double>(data.size());
}

std::vector<PenaltySpec> auto_catalog(ModelFamily family, double kappa) {
  std::vector<PenaltySpec> out;
  out.push_back(parse_penalty("none", family, kappa));
  out.push_back(parse_penalty("pen2", family, kappa));
  out.push_back(parse_penalty("mean-l2", family, kappa));
  if (family != ModelFamily::Binomial) out.push_back(parse_penalty("full", family, kappa));
  return out;
}

FitOutcome run_fit(const FitFlags& flags, const CountDataset& data) {
  FitOutcome out;
  out.family = parse_family(flags.family_text);
  const LambdaGrid grid =
      flags.grid_path.empty() ? default_lambda_grid() : load_lambda_grid(flags.grid_path);

  const MleResult mle = mle_fit(out.family, data);
  out.fits.push_back({"mle", mle.params});

  if (flags.lambda_text == "cv") {
    out.used_cv = true;
    const FoldPlan folds = make_folds(data, flags.folds, flags.seed);
    std::vector<PenaltySpec> candidates;
    if (flags.penalty_text == "auto") {
      candidates = auto_catalog(out.family, flags.kappa);
    } else {
      candidates.push_back(parse_penalty(flags.penalty_text, out.family, flags.kappa));
    }

    const int threads = max_threads();
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<CVResult> results;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      results.push_back(vfcv(out.family, candidates[c], grid, data, folds, threads));
      const auto& r = results.back();
      const double score = *std::min_element(r.scores.begin(), r.scores.end());
      CvComparisonRow row;
      row.penalty = penalty_name(candidates[c]);
      row.best_score = score;
      row.lambda_opt = r.lambda_opt;
      row.has_lambda = candidates[c].kind != PenaltyKind::None;
      out.cv_rows.push_back(row);
      if (score < best_score) {
        best_score = score;
        best = c;
      }
    }
    out.cv_rows[best].selected = true;
    if (candidates[best].kind != PenaltyKind::None) {
      out.fits.push_back({penalty_name(candidates[best]), results[best].final_params});
      out.converged = results[best].final_fit.converged;
    }
    return out;
  }

  // Explicit lambda: a single penalized fit with coefficient lambda * mean(n_i).
  const double lambda = [&] {
    try {
      return std::stod(flags.lambda_text);
    } catch (...) {
      throw std::invalid_argument("--lambda must be a number or 'cv'");
    }
  }();
  if (lambda < 0.0) throw std::invalid_argument("--lambda must be >= 0");
  const PenaltySpec penalty = [&] {
    if (flags.penalty_text == "auto")
      throw std::invalid_argument("--penalty auto requires --lambda cv");
    return parse_penalty(flags.penalty_text, out.family, flags.kappa);
  }();
  if (penalty.kind != PenaltyKind::None) {
    const FitResult fit =
        fit_penalized(out.family, penalty, lambda * mean_sample_size(data), data);
    out.fits.push_back({penalty_name(penalty), fit.params});
    out.converged = fit.converged;
  }
  return out;
}

void print_cv_lines(const FitOutcome& outcome, std::ostream& os) {
  for (const auto& row : outcome.cv_rows) {
    os << "# cv: penalty=" << row.penalty << " vfcv_score=" << row.best_score;
    if (row.has_lambda)
      os << " log_lambda_opt_plus1=" << std::log(row.lambda_opt + 1.0)
         << " lambda_opt=" << row.lambda_opt;
    os << " selected=" << (row.selected ? 1 : 0) << "\n";
  }
}

void write_outputs(const FitFlags& flags, const CountDataset& data,
                   const FitOutcome& outcome, bool full_report) {
  if (flags.out_dir.empty()) return;
  fs::create_directories(flags.out_dir);
  const fs::path dir(flags.out_dir);

  {
    std::ofstream f(dir / "estimates.csv");
    write_estimates_csv(data, outcome.fits, f);
  }
  if (outcome.used_cv) {
    std::ofstream f(dir / "cv_scores.csv");
    write_cv_csv(outcome.family, outcome.cv_rows, f);
  }
  if (full_report) {
    {
      std::ofstream f(dir / "summary.csv");
      write_summary_csv(data, f);
    }
    const LabeledFit& shown = outcome.fits.back();  // penalized when present, else mle
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& v = data.variables[i];
      std::ofstream f(dir / ("fitdiag_" + v.id + ".csv"));
      write_fit_diagnostics_csv(v, outcome.family, shown.params.par1[i],
                                shown.params.par2.empty() ? 0.0 : shown.params.par2[i], f);
    }
  }
}

int cmd_fit(const FitFlags& flags, bool full_report) {
  const CountDataset data = load_counts_csv(flags.data_path);
  const FitOutcome outcome = run_fit(flags, data);
  print_cv_lines(outcome, std::cout);
  write_estimates_csv(data, outcome.fits, std::cout);
  write_outputs(flags, data, outcome, full_report);
  return outcome.converged ? 0 : 3;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const SimConfig cfg = load_sim_config(config_path);
  const MSEReport report = mse_ratio_study(cfg, max_threads());
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  {
    std::ofstream f(dir / (cfg.name + "_mse.csv"));
    write_mse_report_csv(report, f);
  }
  {
    std::ofstream f(dir / (cfg.name + "_provenance.txt"));
    write_provenance(cfg, report, f);
  }
  write_mse_report_csv(report, std::cout);
  return report.valid ? 0 : 3;
}

// Synthetic example dataset: ten passage-like variables with unequal lengths
// and roughly fifty readers each, drawn from beta-binomial models with small
// success proportions. Purely artificial; for demos and tests.
int cmd_synth(const std::string& out_path, std::uint64_t seed) {
  const std::vector<int> sizes = {49, 51, 51, 50, 52, 51, 50, 53, 51, 50};
  const std::vector<int> lengths = {48, 50, 69, 50, 44, 56, 44, 48, 51, 47};
  Rng rng(seed);
  CountDataset data;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    VariableData v;
    v.id = "P" + std::to_string(i + 1);
    v.trials = lengths[i];
    const double p = 0.018 + 0.022 * rng.uniform01();
    const double nu = 2.0 + 4.0 * rng.uniform01();
    const double total = (lengths[i] - nu) / (nu - 1.0);
    const double alpha = p * total, beta = (1.0 - p) * total;
    for (int j = 0; j < sizes[i]; ++j) {
      const double t = rng.beta(alpha, beta);
      v.counts.push_back(rng.binomial(lengths[i], t));
    }
    data.variables.push_back(std::move(v));
  }
  save_counts_csv(data, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized likelihood estimation for bounded count models"};
  app.require_subcommand(1);

  FitFlags fit_flags;
  auto* fit_cmd = app.add_subcommand("fit", "fit models, optionally selecting shrinkage by CV");
  add_fit_flags(fit_cmd, fit_flags, false);

  FitFlags report_flags;
  auto* report_cmd =
      app.add_subcommand("report", "fit and write summary / estimates / pmf-cdf tables");
  add_fit_flags(report_cmd, report_flags, true);

  std::string sim_config, sim_out = ".";
  auto* sim_cmd = app.add_subcommand("simulate", "run a Monte Carlo MSE-ratio study");
  sim_cmd->add_option("--config", sim_config, "flat key = value config file")->required();
  sim_cmd->add_option("--out", sim_out, "output directory");

  std::string synth_out = "synthetic.csv";
  std::uint64_t synth_seed = 1;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic example dataset");
  synth_cmd->add_option("--out", synth_out, "output CSV path");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_flags, false);
    if (report_cmd->parsed()) return cmd_fit(report_flags, true);
    if (sim_cmd->parsed()) return cmd_simulate(sim_config, sim_out);
    if (synth_cmd->parsed()) return cmd_synth(synth_out, synth_seed);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConstraintError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

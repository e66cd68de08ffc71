#pragma once

#include <iosfwd>
#include <string>

#include "shrinkcount/count_models.hpp"
#include "shrinkcount/cross_validation.hpp"
#include "shrinkcount/dataset.hpp"
#include "shrinkcount/penalties.hpp"
#include "shrinkcount/simulation.hpp"

namespace shrinkcount {

// Counts CSV: header `variable_id,N,count`, one observation per row. Rows of
// one variable may be interleaved with others but must agree on N; variables
// appear in the output dataset in order of first appearance.
// Throws ParseError (with line number) or ConstraintError.
CountDataset load_counts_csv(const std::string& path);
CountDataset load_counts_csv(std::istream& in, const std::string& source_name);

void save_counts_csv(const CountDataset& data, std::ostream& out);
void save_counts_csv(const CountDataset& data, const std::string& path);

ModelFamily parse_family(const std::string& text);

// Penalty vocabulary: none, pen1..pen5, mean-l2, mean-q2, full. `full`
// resolves against the family (zib or betabin only); pen5 takes its kappa
// from the argument.
PenaltySpec parse_penalty(const std::string& text, ModelFamily family, double kappa);

// Flat `key = value` simulation config. Keys: family, shape, a, b, a2, b2,
// I, N, n, K, V, penalties (comma-separated), seed. Unknown keys and every
// other problem are reported together in one ConfigError. The config name is
// the file stem; the lambda grid is the default 63-point grid.
SimConfig load_sim_config(const std::string& path);
SimConfig parse_sim_config(std::istream& in, const std::string& name);

// One nonnegative value per line, ascending, first value 0.
LambdaGrid load_lambda_grid(const std::string& path);

}  // namespace shrinkcount

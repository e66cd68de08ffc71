#include "shrinkcount/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "shrinkcount/errors.hpp"

namespace shrinkcount {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream stream(s);
  while (std::getline(stream, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.push_back("");
  return parts;
}

int parse_int_field(const std::string& text, const char* what, long line) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ParseError(std::string("expected an integer for ") + what + ", got '" + text + "'",
                     line);
  }
}

}  // namespace

CountDataset load_counts_csv(std::istream& in, const std::string& source_name) {
  CountDataset data;
  std::map<std::string, std::size_t> index;  // variable id -> position
  std::string line;
  long line_no = 0;

  if (!std::getline(in, line))
    throw ParseError(source_name + ": empty file", 0);
  ++line_no;
  {
    auto headers = split(trim(line), ',');
    for (auto& h : headers) h = trim(h);
    if (headers.size() != 3 || headers[0] != "variable_id" || headers[1] != "N" ||
        headers[2] != "count")
      throw ParseError(source_name + ": header must be 'variable_id,N,count'", line_no);
  }

  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    auto fields = split(row, ',');
    if (fields.size() != 3)
      throw ParseError(source_name + ": expected 3 fields", line_no);
    const std::string id = trim(fields[0]);
    if (id.empty()) throw ParseError(source_name + ": empty variable_id", line_no);
    const int trials = parse_int_field(trim(fields[1]), "N", line_no);
    const int count = parse_int_field(trim(fields[2]), "count", line_no);

    if (trials < 1)
      throw ConstraintError(source_name + " line " + std::to_string(line_no) +
                            ": N must be >= 1");
    if (count < 0 || count > trials)
      throw ConstraintError(source_name + " line " + std::to_string(line_no) + ": count " +
                            std::to_string(count) + " outside [0, " +
                            std::to_string(trials) + "]");

    auto it = index.find(id);
    if (it == index.end()) {
      index.emplace(id, data.variables.size());
      data.variables.push_back({id, trials, {count}});
    } else {
      auto& v = data.variables[it->second];
      if (v.trials != trials)
        throw ConstraintError(source_name + " line " + std::to_string(line_no) +
                              ": variable '" + id + "' changes N from " +
                              std::to_string(v.trials) + " to " + std::to_string(trials));
      v.counts.push_back(count);
    }
  }

  data.validate();
  return data;
}

CountDataset load_counts_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return load_counts_csv(in, path);
}

void save_counts_csv(const CountDataset& data, std::ostream& out) {
  out << "variable_id,N,count\n";
  for (const auto& v : data.variables)
    for (int x : v.counts) out << v.id << ',' << v.trials << ',' << x << '\n';
}

void save_counts_csv(const CountDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing", 0);
  save_counts_csv(data, out);
}

ModelFamily parse_family(const std::string& text) {
  if (text == "binomial") return ModelFamily::Binomial;
  if (text == "zib") return ModelFamily::Zib;
  if (text == "betabin") return ModelFamily::BetaBinomial;
  throw std::invalid_argument("unknown family '" + text +
                              "' (expected binomial, zib or betabin)");
}

PenaltySpec parse_penalty(const std::string& text, ModelFamily family, double kappa) {
  PenaltySpec spec;
  if (text == "none") spec.kind = PenaltyKind::None;
  else if (text == "pen1") spec.kind = PenaltyKind::L1Zero;
  else if (text == "pen2") spec.kind = PenaltyKind::L2Zero;
  else if (text == "pen3") spec.kind = PenaltyKind::LogBarrier;
  else if (text == "pen4") spec.kind = PenaltyKind::LogGreedy;
  else if (text == "pen5") spec.kind = PenaltyKind::Kappa;
  else if (text == "mean-l2") spec.kind = PenaltyKind::MeanL2;
  else if (text == "mean-q2") spec.kind = PenaltyKind::MeanQ2;
  else if (text == "full") {
    switch (family) {
      case ModelFamily::Zib: spec.kind = PenaltyKind::FullZib; break;
      case ModelFamily::BetaBinomial: spec.kind = PenaltyKind::FullBetaBinomial; break;
      default:
        throw FamilyMismatchError("penalty 'full' requires family zib or betabin");
    }
  } else {
    throw std::invalid_argument("unknown penalty '" + text + "'");
  }
  spec.kappa = kappa;
  spec.validate(family);
  return spec;
}

SimConfig parse_sim_config(std::istream& in, const std::string& name) {
  std::map<std::string, std::string> kv;
  std::vector<std::string> problems;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty() || row[0] == '#') continue;
    const auto eq = row.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(row.substr(0, eq));
    const std::string value = trim(row.substr(eq + 1));
    if (kv.count(key))
      problems.push_back("duplicate key '" + key + "'");
    else
      kv[key] = value;
  }

  static const char* known[] = {"family", "shape", "a", "b",  "a2",        "b2",  "I",
                                "N",      "n",     "K", "V",  "penalties", "seed"};
  for (const auto& [key, value] : kv) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      problems.push_back("unknown key '" + key + "'");
  }

  SimConfig cfg;
  cfg.name = name;
  cfg.grid = default_lambda_grid();

  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto require = [&](const char* key) -> const std::string* {
    const std::string* v = get(key);
    if (!v) problems.push_back(std::string("missing key '") + key + "'");
    return v;
  };
  auto to_int = [&](const char* key, const std::string& v, int& out) {
    try {
      out = std::stoi(v);
    } catch (...) {
      problems.push_back(std::string("key '") + key + "': not an integer: '" + v + "'");
    }
  };
  auto to_double = [&](const char* key, const std::string& v, double& out) {
    try {
      out = std::stod(v);
    } catch (...) {
      problems.push_back(std::string("key '") + key + "': not a number: '" + v + "'");
    }
  };

  if (const auto* v = require("family")) {
    try {
      cfg.family = parse_family(*v);
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
  }
  Shape shape = Shape::Flat;
  if (const auto* v = require("shape")) {
    if (*v == "skew") shape = Shape::Skew;
    else if (*v == "flat") shape = Shape::Flat;
    else if (*v == "bell") shape = Shape::Bell;
    else problems.push_back("unknown shape '" + *v + "' (expected skew, flat or bell)");
  }
  cfg.primary.shape = shape;
  if (const auto* v = require("a")) to_double("a", *v, cfg.primary.lower);
  if (const auto* v = require("b")) to_double("b", *v, cfg.primary.upper);
  if (get("a2") || get("b2")) {
    ShapeSpec sec;
    sec.shape = shape;
    if (const auto* v = require("a2")) to_double("a2", *v, sec.lower);
    if (const auto* v = require("b2")) to_double("b2", *v, sec.upper);
    cfg.secondary = sec;
  }
  if (const auto* v = get("I")) to_int("I", *v, cfg.num_variables);
  if (const auto* v = get("N")) to_int("N", *v, cfg.trials);
  if (const auto* v = get("n")) to_int("n", *v, cfg.observations);
  if (const auto* v = get("K")) to_int("K", *v, cfg.replications);
  if (const auto* v = get("V")) to_int("V", *v, cfg.folds);
  if (const auto* v = get("seed")) {
    try {
      cfg.master_seed = std::stoull(*v);
    } catch (...) {
      problems.push_back("key 'seed': not an integer: '" + *v + "'");
    }
  }
  if (const auto* v = require("penalties")) {
    for (auto& part : split(*v, ',')) {
      const std::string pen = trim(part);
      if (pen.empty()) continue;
      try {
        cfg.penalties.push_back(parse_penalty(pen, cfg.family, 0.5));
      } catch (const std::exception& e) {
        problems.push_back(std::string("penalty '") + pen + "': " + e.what());
      }
    }
  }

  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid simulation config '" << name << "':";
    for (const auto& p : problems) msg << "\n  - " << p;
    throw ConfigError(msg.str());
  }
  cfg.validate();
  return cfg;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  // Config name: file stem.
  std::string name = path;
  if (const auto slash = name.find_last_of("/\\"); slash != std::string::npos)
    name = name.substr(slash + 1);
  if (const auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0)
    name = name.substr(0, dot);
  return parse_sim_config(in, name);
}

LambdaGrid load_lambda_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  LambdaGrid grid;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty() || row[0] == '#') continue;
    try {
      grid.values.push_back(std::stod(row));
    } catch (...) {
      throw ParseError("'" + path + "': not a number: '" + row + "'", line_no);
    }
  }
  grid.validate();
  return grid;
}

}  // namespace shrinkcount

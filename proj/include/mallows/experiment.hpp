#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "mallows/permutation.hpp"
#include "mallows/report.hpp"

namespace mallows {

struct QRule {
  std::string type = "fixed";  // fixed: q = value; power: q = 1 - c n^-x
  double value = 0.5;
  double c = 1.0;
  double x = 0.5;
  double at(double n) const;
};

struct ExperimentConfig {
  std::string regime;
  Permutation pattern = Permutation::trusted({2, 1});
  std::vector<int> n_grid;
  QRule q_rule;
  std::int64_t replicates = 1000;
  std::int64_t blocks = 1'000'000;
  std::uint64_t seed = 1;
  std::map<std::string, double> thresholds;
  std::map<std::string, std::string> raw;  // echo of the parsed keys

  double threshold(const std::string& name, double fallback) const;
};

struct StatisticRow {
  std::string name;
  double estimate = 0;
  double se = 0;
  double target = 0;
  bool pass = true;
};

struct ExperimentReport {
  std::map<std::string, std::string> config;
  std::vector<StatisticRow> rows;
  bool all_pass() const;
  Table table() const;
};

// key = value lines; '#' starts a comment; nested keys use dots (q_rule.type, thresholds.ks).
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentReport run_regime_experiment(const ExperimentConfig& config);
void emit_report(const ExperimentReport& report, Format format, std::ostream& out);

}  // namespace mallows

#ifndef COORDLAB_REPORT_HPP
#define COORDLAB_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include "coordlab/efficiency.hpp"

namespace coordlab {

// Per-word data points feeding the position regressions: (position, value).
struct PositionData {
  std::vector<std::pair<double, double>> predictability;  // negative surprisal
  std::vector<std::pair<double, double>> parsability;     // best-parse posterior
};

struct RegimeStats {
  Regime regime = Regime::StructureReduction;
  double mean_predictability = 0.0;  // raw, nats/word
  double mean_parsability = 0.0;
  double mean_pred_z = 0.0;
  double mean_parse_z = 0.0;
  CiBand band;
  Regression pred_regression;
  Regression parse_regression;
  // Mean per-word value at each word position (bins with >= 5 points).
  std::vector<std::pair<double, double>> pred_position_means;
  std::vector<std::pair<double, double>> parse_position_means;
  std::size_t languages = 0;
  std::size_t failures = 0;
};

struct RegimePairTests {
  Regime a, b;
  PairedTest predictability;
  PairedTest parsability;
};

struct RegimePairCrossings {
  Regime a, b;
  std::vector<Crossing> crossings;
};

struct EfficiencyReport {
  std::vector<LanguageScore> scores;  // one per (order, seed, regime)
  std::vector<double> pred_z;         // aligned with scores
  std::vector<double> parse_z;
  std::vector<RegimeStats> regimes;
  std::vector<RegimePairTests> tests;
  std::vector<RegimePairCrossings> crossings;
  // Largest interval where structure-reduction's lower CI bound exceeds both
  // other regimes' upper bounds; empty when dominance_lo > dominance_hi.
  double dominance_lo = 1.0;
  double dominance_hi = 0.0;
  double alpha = 0.05 / 3;
};

// Aggregates scores (z-transform pooled over all languages), builds per-type
// bands, pairwise tests (paired by word order and seed), crossings, and the
// position regressions.
EfficiencyReport build_report(const std::vector<LanguageScore>& scores,
                              const std::map<int, PositionData>& position_data,
                              int lambda_grid = 1001, double alpha = 0.05 / 3);

// Writes scores.tsv, bands.tsv, ttests.tsv, intersections.tsv,
// regression.tsv, report.txt and the SVG figures into dir.
void write_report(const EfficiencyReport& report, const std::string& dir);

}  // namespace coordlab

#endif

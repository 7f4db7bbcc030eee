#ifndef COORDLAB_EFFICIENCY_HPP
#define COORDLAB_EFFICIENCY_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coordlab/decoder.hpp"
#include "coordlab/grammar.hpp"

namespace coordlab {

struct LanguageScore {
  LanguageSpec language;
  double predictability = 0.0;  // mean negative surprisal per word, <= 0
  double parsability = 0.0;     // mean best-parse log-posterior per word, <= 0
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::size_t failures = 0;
};

// Aggregates per-sentence measures; failure-flagged sentences enter with
// their floor values and are counted.
LanguageScore score_language(const LanguageSpec& spec,
                             const std::vector<SentenceMeasures>& measures);

// (x - mean) / population sigma. Throws on fewer than two distinct values.
std::vector<double> z_transform(const std::vector<double>& values);

// lambda * pred_z + (1 - lambda) * parse_z; lambda must lie in [0, 1].
double omega(double pred_z, double parse_z, double lambda);

struct CiBand {
  std::vector<double> lambda;
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
};

// Normal-approximation 95% band for the mean of omega(lambda) over languages,
// computed exactly from the first two moments of the (pred_z, parse_z)
// pairs, evaluated on a lambda grid.
CiBand ci_band(const std::vector<std::pair<double, double>>& z_pairs,
               int grid_points = 1001);

struct Crossing {
  double lambda;
  std::string which;  // "a.lower/b.upper" or "a.upper/b.lower"
};

// Crossings of a.lower with b.upper and a.upper with b.lower on [0,1],
// located by sign change with linear interpolation inside grid segments.
std::vector<Crossing> ci_intersections(const CiBand& a, const CiBand& b);

struct PairedTest {
  double t = 0.0;
  int df = 0;
  double p = 1.0;  // two-sided
  double alpha = 0.05 / 3;
  bool significant = false;
};

// Classic paired t-test; throws on length mismatch, n < 2, or zero
// difference variance.
PairedTest paired_tests(const std::vector<double>& x, const std::vector<double>& y,
                        double alpha = 0.05 / 3);

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares of value on word position.
Regression position_regression(const std::vector<std::pair<double, double>>& points);

// Normal z statistic for the difference of two independent slopes.
double slope_difference_z(const Regression& a, const Regression& b);

}  // namespace coordlab

#endif

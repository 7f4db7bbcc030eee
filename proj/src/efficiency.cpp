#include "coordlab/efficiency.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <set>

#include "coordlab/error.hpp"

namespace coordlab {

LanguageScore score_language(const LanguageSpec& spec,
                             const std::vector<SentenceMeasures>& measures) {
  if (measures.empty()) throw Error("score_language: no measures");
  LanguageScore s;
  s.language = spec;
  double surprisal_sum = 0.0, posterior_sum = 0.0;
  for (const SentenceMeasures& m : measures) {
    s.sentences += 1;
    if (m.failed) s.failures += 1;
    s.words += m.surprisal.size();
    for (double x : m.surprisal) surprisal_sum += x;
    for (double x : m.best_posterior) posterior_sum += x;
  }
  if (s.words == 0) throw Error("score_language: zero words");
  s.predictability = -surprisal_sum / static_cast<double>(s.words);
  s.parsability = posterior_sum / static_cast<double>(s.words);
  return s;
}

std::vector<double> z_transform(const std::vector<double>& values) {
  std::set<double> distinct(values.begin(), values.end());
  if (distinct.size() < 2)
    throw Error("z_transform: need at least two distinct values");
  double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;  // population variance
  if (var <= 0.0) throw Error("z_transform: zero variance");
  double sd = std::sqrt(var);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - mean) / sd);
  return out;
}

double omega(double pred_z, double parse_z, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw Error("omega: lambda outside [0,1]");
  return lambda * pred_z + (1.0 - lambda) * parse_z;
}

CiBand ci_band(const std::vector<std::pair<double, double>>& z_pairs,
               int grid_points) {
  std::size_t n = z_pairs.size();
  if (n < 2) throw Error("ci_band: need at least two languages");
  if (grid_points < 2) throw Error("ci_band: need at least two grid points");

  double mp = 0.0, mq = 0.0;
  for (auto& [p, q] : z_pairs) {
    mp += p;
    mq += q;
  }
  mp /= static_cast<double>(n);
  mq /= static_cast<double>(n);
  double spp = 0.0, sqq = 0.0, spq = 0.0;
  for (auto& [p, q] : z_pairs) {
    spp += (p - mp) * (p - mp);
    sqq += (q - mq) * (q - mq);
    spq += (p - mp) * (q - mq);
  }
  double denom = static_cast<double>(n - 1);
  spp /= denom;
  sqq /= denom;
  spq /= denom;

  CiBand band;
  band.lambda.reserve(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    double l = static_cast<double>(i) / (grid_points - 1);
    double mean = l * mp + (1.0 - l) * mq;
    double var = l * l * spp + (1.0 - l) * (1.0 - l) * sqq +
                 2.0 * l * (1.0 - l) * spq;
    double half = 1.96 * std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    band.lambda.push_back(l);
    band.mean.push_back(mean);
    band.lower.push_back(mean - half);
    band.upper.push_back(mean + half);
  }
  return band;
}

namespace {

void find_crossings(const std::vector<double>& lambda, const std::vector<double>& f,
                    const std::vector<double>& g, const std::string& which,
                    std::vector<Crossing>* out) {
  std::size_t n = lambda.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double d0 = f[i] - g[i];
    double d1 = f[i + 1] - g[i + 1];
    if (d0 == 0.0) {
      if (out->empty() || out->back().which != which ||
          std::fabs(out->back().lambda - lambda[i]) > 1e-12)
        out->push_back({lambda[i], which});
    } else if (d0 * d1 < 0.0) {
      double t = d0 / (d0 - d1);
      out->push_back({lambda[i] + t * (lambda[i + 1] - lambda[i]), which});
    }
  }
  if (f[n - 1] == g[n - 1]) out->push_back({lambda[n - 1], which});
}

}  // namespace

std::vector<Crossing> ci_intersections(const CiBand& a, const CiBand& b) {
  if (a.lambda != b.lambda) throw Error("ci_intersections: bands use different grids");
  std::vector<Crossing> out;
  find_crossings(a.lambda, a.lower, b.upper, "a.lower/b.upper", &out);
  find_crossings(a.lambda, a.upper, b.lower, "a.upper/b.lower", &out);
  std::sort(out.begin(), out.end(),
            [](const Crossing& x, const Crossing& y) { return x.lambda < y.lambda; });
  return out;
}

PairedTest paired_tests(const std::vector<double>& x, const std::vector<double>& y,
                        double alpha) {
  if (x.size() != y.size()) throw Error("paired_tests: length mismatch");
  std::size_t n = x.size();
  if (n < 2) throw Error("paired_tests: need at least two pairs");
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i] - y[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = x[i] - y[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);
  if (var <= 0.0) throw Error("paired_tests: degenerate pairing (zero variance)");

  PairedTest r;
  r.df = static_cast<int>(n) - 1;
  r.t = mean / std::sqrt(var / static_cast<double>(n));
  boost::math::students_t_distribution<double> dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  r.alpha = alpha;
  r.significant = r.p < alpha;
  return r;
}

Regression position_regression(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw Error("position_regression: need at least three points");
  std::set<double> xs;
  for (auto& [x, y] : points) xs.insert(x);
  if (xs.size() < 2) throw Error("position_regression: all positions equal");

  double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  Regression r;
  r.n = points.size();
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double rss = 0.0;
  for (auto& [x, y] : points) {
    double e = y - (r.intercept + r.slope * x);
    rss += e * e;
  }
  double sigma2 = points.size() > 2 ? rss / (n - 2.0) : 0.0;
  r.slope_se = std::sqrt(sigma2 / sxx);
  return r;
}

double slope_difference_z(const Regression& a, const Regression& b) {
  double se = std::sqrt(a.slope_se * a.slope_se + b.slope_se * b.slope_se);
  if (se == 0.0) throw Error("slope_difference_z: zero standard error");
  return (a.slope - b.slope) / se;
}

}  // namespace coordlab

#include "coordlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "coordlab/error.hpp"
#include "coordlab/util.hpp"

namespace coordlab {

namespace {

const Regime kRegimes[3] = {Regime::StructureReduction, Regime::NoReduction,
                            Regime::LinearReduction};

struct PairKey {
  int order;
  std::uint64_t seed;
  bool operator<(const PairKey& o) const {
    if (order != o.order) return order < o.order;
    return seed < o.seed;
  }
};

}  // namespace

EfficiencyReport build_report(const std::vector<LanguageScore>& scores,
                              const std::map<int, PositionData>& position_data,
                              int lambda_grid, double alpha) {
  if (scores.size() < 2) throw Error("build_report: need at least two languages");
  EfficiencyReport rep;
  rep.alpha = alpha;
  rep.scores = scores;
  std::sort(rep.scores.begin(), rep.scores.end(),
            [](const LanguageScore& a, const LanguageScore& b) {
              if (a.language.word_order_id != b.language.word_order_id)
                return a.language.word_order_id < b.language.word_order_id;
              if (a.language.seed != b.language.seed)
                return a.language.seed < b.language.seed;
              return static_cast<int>(a.language.regime) <
                     static_cast<int>(b.language.regime);
            });

  std::vector<double> pred, parse;
  for (const LanguageScore& s : rep.scores) {
    pred.push_back(s.predictability);
    parse.push_back(s.parsability);
  }
  rep.pred_z = z_transform(pred);
  rep.parse_z = z_transform(parse);

  for (Regime r : kRegimes) {
    RegimeStats st;
    st.regime = r;
    std::vector<std::pair<double, double>> z_pairs;
    for (std::size_t i = 0; i < rep.scores.size(); ++i) {
      if (rep.scores[i].language.regime != r) continue;
      st.mean_predictability += rep.scores[i].predictability;
      st.mean_parsability += rep.scores[i].parsability;
      st.mean_pred_z += rep.pred_z[i];
      st.mean_parse_z += rep.parse_z[i];
      st.failures += rep.scores[i].failures;
      z_pairs.push_back({rep.pred_z[i], rep.parse_z[i]});
      st.languages += 1;
    }
    if (st.languages == 0) continue;
    double n = static_cast<double>(st.languages);
    st.mean_predictability /= n;
    st.mean_parsability /= n;
    st.mean_pred_z /= n;
    st.mean_parse_z /= n;
    if (st.languages >= 2) st.band = ci_band(z_pairs, lambda_grid);
    auto it = position_data.find(static_cast<int>(r));
    if (it != position_data.end()) {
      if (it->second.predictability.size() >= 3)
        st.pred_regression = position_regression(it->second.predictability);
      if (it->second.parsability.size() >= 3)
        st.parse_regression = position_regression(it->second.parsability);
      auto bin = [](const std::vector<std::pair<double, double>>& pts) {
        std::map<int, std::pair<double, int>> bins;
        for (auto& [x, y] : pts) {
          auto& [sum, n] = bins[static_cast<int>(x)];
          sum += y;
          n += 1;
        }
        std::vector<std::pair<double, double>> out;
        for (auto& [posn, agg] : bins)
          if (agg.second >= 5)
            out.push_back({static_cast<double>(posn), agg.first / agg.second});
        return out;
      };
      st.pred_position_means = bin(it->second.predictability);
      st.parse_position_means = bin(it->second.parsability);
    }
    rep.regimes.push_back(std::move(st));
  }

  // Pairwise tests, paired by (word order, seed).
  std::map<PairKey, std::map<int, std::pair<double, double>>> by_pair;
  for (const LanguageScore& s : rep.scores)
    by_pair[{s.language.word_order_id, s.language.seed}]
           [static_cast<int>(s.language.regime)] = {s.predictability, s.parsability};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      std::vector<double> pa, pb, qa, qb;
      for (auto& [key, vals] : by_pair) {
        auto a = vals.find(static_cast<int>(kRegimes[i]));
        auto b = vals.find(static_cast<int>(kRegimes[j]));
        if (a == vals.end() || b == vals.end()) continue;
        pa.push_back(a->second.first);
        pb.push_back(b->second.first);
        qa.push_back(a->second.second);
        qb.push_back(b->second.second);
      }
      if (pa.size() < 2) continue;
      RegimePairTests t;
      t.a = kRegimes[i];
      t.b = kRegimes[j];
      t.predictability = paired_tests(pa, pb, alpha);
      t.parsability = paired_tests(qa, qb, alpha);
      rep.tests.push_back(std::move(t));
    }
  }

  // Band crossings per regime pair.
  std::map<int, const RegimeStats*> by_regime;
  for (const RegimeStats& st : rep.regimes) by_regime[static_cast<int>(st.regime)] = &st;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      auto a = by_regime.find(static_cast<int>(kRegimes[i]));
      auto b = by_regime.find(static_cast<int>(kRegimes[j]));
      if (a == by_regime.end() || b == by_regime.end()) continue;
      if (a->second->band.lambda.empty() || b->second->band.lambda.empty()) continue;
      RegimePairCrossings c;
      c.a = kRegimes[i];
      c.b = kRegimes[j];
      c.crossings = ci_intersections(a->second->band, b->second->band);
      rep.crossings.push_back(std::move(c));
    }
  }

  // Dominance interval: structure-reduction lower bound above both other
  // upper bounds.
  auto s = by_regime.find(static_cast<int>(Regime::StructureReduction));
  auto nr = by_regime.find(static_cast<int>(Regime::NoReduction));
  auto lr = by_regime.find(static_cast<int>(Regime::LinearReduction));
  if (s != by_regime.end() && nr != by_regime.end() && lr != by_regime.end() &&
      !s->second->band.lambda.empty()) {
    const CiBand& sb = s->second->band;
    const CiBand& nb = nr->second->band;
    const CiBand& lb = lr->second->band;
    double best_lo = 1.0, best_hi = 0.0, cur_lo = -1.0;
    for (std::size_t k = 0; k < sb.lambda.size(); ++k) {
      bool dominant = sb.lower[k] > nb.upper[k] && sb.lower[k] > lb.upper[k];
      if (dominant && cur_lo < 0.0) cur_lo = sb.lambda[k];
      if ((!dominant || k + 1 == sb.lambda.size()) && cur_lo >= 0.0) {
        double hi = dominant ? sb.lambda[k] : sb.lambda[k - 1];
        if (hi - cur_lo > best_hi - best_lo) {
          best_lo = cur_lo;
          best_hi = hi;
        }
        cur_lo = -1.0;
      }
    }
    rep.dominance_lo = best_lo;
    rep.dominance_hi = best_hi;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Emission

namespace {

const char* kColors[3] = {"#1f77b4", "#d62728", "#2ca02c"};

int regime_slot(Regime r) { return static_cast<int>(r); }

struct SvgCanvas {
  std::ostringstream body;
  double width, height;
  double margin_l = 60, margin_r = 20, margin_t = 20, margin_b = 45;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

  SvgCanvas(double w, double h) : width(w), height(h) {}

  double px(double x) const {
    return margin_l + (x - x_min) / (x_max - x_min) * (width - margin_l - margin_r);
  }
  double py(double y) const {
    return height - margin_b -
           (y - y_min) / (y_max - y_min) * (height - margin_t - margin_b);
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double w = 1.0, const std::string& dash = "") {
    body << "<line x1='" << x1 << "' y1='" << y1 << "' x2='" << x2 << "' y2='"
         << y2 << "' stroke='" << stroke << "' stroke-width='" << w << "'";
    if (!dash.empty()) body << " stroke-dasharray='" << dash << "'";
    body << "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double w = 1.5) {
    body << "<polyline fill='none' stroke='" << stroke << "' stroke-width='" << w
         << "' points='";
    for (auto& [x, y] : pts) body << px(x) << "," << py(y) << " ";
    body << "'/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts,
               const std::string& fill, double opacity) {
    body << "<polygon fill='" << fill << "' fill-opacity='" << opacity
         << "' stroke='none' points='";
    for (auto& [x, y] : pts) body << px(x) << "," << py(y) << " ";
    body << "'/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    body << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='" << r
         << "' fill='" << fill << "'/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 12,
            const std::string& anchor = "start") {
    body << "<text x='" << x << "' y='" << y << "' font-size='" << size
         << "' font-family='sans-serif' text-anchor='" << anchor << "'>" << s
         << "</text>\n";
  }

  void axes(const std::string& xlabel, const std::string& ylabel, int xticks = 5,
            int yticks = 5) {
    line(margin_l, height - margin_b, width - margin_r, height - margin_b, "#000");
    line(margin_l, margin_t, margin_l, height - margin_b, "#000");
    for (int i = 0; i <= xticks; ++i) {
      double x = x_min + (x_max - x_min) * i / xticks;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2g", x);
      line(px(x), height - margin_b, px(x), height - margin_b + 4, "#000");
      text(px(x), height - margin_b + 18, buf, 11, "middle");
    }
    for (int i = 0; i <= yticks; ++i) {
      double y = y_min + (y_max - y_min) * i / yticks;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2g", y);
      line(margin_l - 4, py(y), margin_l, py(y), "#000");
      text(margin_l - 8, py(y) + 4, buf, 11, "end");
    }
    text((margin_l + width - margin_r) / 2, height - 8, xlabel, 13, "middle");
    body << "<text x='16' y='" << (margin_t + height - margin_b) / 2
         << "' font-size='13' font-family='sans-serif' text-anchor='middle' "
            "transform='rotate(-90 16 "
         << (margin_t + height - margin_b) / 2 << ")'>" << ylabel << "</text>\n";
  }

  std::string finish() const {
    std::ostringstream out;
    out << "<?xml version='1.0' encoding='UTF-8'?>\n"
        << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
        << "' height='" << height << "' viewBox='0 0 " << width << " " << height
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
        << body.str() << "</svg>\n";
    return out.str();
  }
};

void write_efficiency_svg(const EfficiencyReport& rep, const std::string& path) {
  SvgCanvas svg(680, 460);
  double lo = 1e300, hi = -1e300;
  for (const RegimeStats& st : rep.regimes) {
    for (double v : st.band.lower) lo = std::min(lo, v);
    for (double v : st.band.upper) hi = std::max(hi, v);
  }
  if (lo > hi) {
    lo = -1;
    hi = 1;
  }
  svg.x_min = 0;
  svg.x_max = 1;
  svg.y_min = lo - 0.05 * (hi - lo);
  svg.y_max = hi + 0.05 * (hi - lo);
  svg.axes("lambda", "communicative efficiency (z units)");

  for (const RegimeStats& st : rep.regimes) {
    const char* color = kColors[regime_slot(st.regime)];
    if (st.band.lambda.empty()) continue;
    std::vector<std::pair<double, double>> shade;
    for (std::size_t i = 0; i < st.band.lambda.size(); ++i)
      shade.push_back({st.band.lambda[i], st.band.upper[i]});
    for (std::size_t i = st.band.lambda.size(); i-- > 0;)
      shade.push_back({st.band.lambda[i], st.band.lower[i]});
    svg.polygon(shade, color, 0.18);
    std::vector<std::pair<double, double>> mean;
    for (std::size_t i = 0; i < st.band.lambda.size(); ++i)
      mean.push_back({st.band.lambda[i], st.band.mean[i]});
    svg.polyline(mean, color, 2.0);
  }
  double ly = 40;
  for (const RegimeStats& st : rep.regimes) {
    const char* color = kColors[regime_slot(st.regime)];
    svg.line(svg.width - 230, ly - 4, svg.width - 205, ly - 4, color, 3);
    svg.text(svg.width - 200, ly, regime_name(st.regime), 12);
    ly += 18;
  }
  write_file(path, svg.finish());
}

void write_bars_svg(const EfficiencyReport& rep, bool predictability,
                    const std::string& path) {
  SvgCanvas svg(520, 420);
  double lo = 1e300, hi = -1e300;
  struct Bar {
    Regime regime;
    double mean, half;
  };
  std::vector<Bar> bars;
  for (const RegimeStats& st : rep.regimes) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < rep.scores.size(); ++i)
      if (rep.scores[i].language.regime == st.regime)
        vals.push_back(predictability ? rep.scores[i].predictability
                                      : rep.scores[i].parsability);
    double n = static_cast<double>(vals.size());
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= n;
    double var = 0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = n > 1 ? var / (n - 1) : 0.0;
    double half = n > 1 ? 1.96 * std::sqrt(var / n) : 0.0;
    bars.push_back({st.regime, mean, half});
    lo = std::min(lo, mean - half);
    hi = std::max(hi, mean + half);
  }
  double pad = 0.1 * std::max(1e-9, hi - lo);
  svg.x_min = 0;
  svg.x_max = 3;
  svg.y_min = lo - pad;
  svg.y_max = hi + pad;
  svg.axes("", predictability ? "predictability (nats/word)"
                              : "parsability (nats/word)",
           3, 5);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const Bar& b = bars[i];
    const char* color = kColors[regime_slot(b.regime)];
    double x = 0.5 + static_cast<double>(i);
    double w = 0.28;
    double y0 = svg.py(svg.y_min);
    double y1 = svg.py(b.mean);
    svg.body << "<rect x='" << svg.px(x - w / 2) << "' y='" << std::min(y0, y1)
             << "' width='" << (svg.px(x + w / 2) - svg.px(x - w / 2))
             << "' height='" << std::fabs(y0 - y1) << "' fill='" << color
             << "' fill-opacity='0.7'/>\n";
    svg.line(svg.px(x), svg.py(b.mean - b.half), svg.px(x), svg.py(b.mean + b.half),
             "#000", 1.5);
    svg.line(svg.px(x) - 5, svg.py(b.mean - b.half), svg.px(x) + 5,
             svg.py(b.mean - b.half), "#000", 1.5);
    svg.line(svg.px(x) - 5, svg.py(b.mean + b.half), svg.px(x) + 5,
             svg.py(b.mean + b.half), "#000", 1.5);
    svg.text(svg.px(x), svg.height - svg.margin_b + 32, regime_name(b.regime), 11,
             "middle");
  }
  write_file(path, svg.finish());
}

void write_position_svg(const EfficiencyReport& rep, bool predictability,
                        const std::string& path) {
  SvgCanvas svg(680, 460);
  struct Series {
    Regime regime;
    std::vector<std::pair<double, double>> points;
    Regression reg;
  };
  std::vector<Series> series;
  double xmax = 1, lo = 1e300, hi = -1e300;
  for (const RegimeStats& st : rep.regimes) {
    Series s;
    s.regime = st.regime;
    s.reg = predictability ? st.pred_regression : st.parse_regression;
    s.points = predictability ? st.pred_position_means : st.parse_position_means;
    for (auto& [x, y] : s.points) {
      xmax = std::max(xmax, x);
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    series.push_back(std::move(s));
  }
  if (lo > hi) {
    lo = -1;
    hi = 0;
  }
  double pad = 0.08 * std::max(1e-9, hi - lo);
  svg.x_min = 0;
  svg.x_max = xmax + 1;
  svg.y_min = lo - pad;
  svg.y_max = hi + pad;
  svg.axes("word position",
           predictability ? "per-word predictability (negative surprisal)"
                          : "per-word parsability (log posterior)");
  for (const Series& s : series) {
    const char* color = kColors[regime_slot(s.regime)];
    for (auto& [x, y] : s.points) svg.circle(x, y, 2.5, color);
    if (s.reg.n >= 3) {
      double y0 = s.reg.intercept + s.reg.slope * svg.x_min;
      double y1 = s.reg.intercept + s.reg.slope * svg.x_max;
      svg.polyline({{svg.x_min, y0}, {svg.x_max, y1}}, color, 1.5);
    }
  }
  double ly = 40;
  for (const Series& s : series) {
    const char* color = kColors[regime_slot(s.regime)];
    svg.line(svg.width - 230, ly - 4, svg.width - 205, ly - 4, color, 3);
    svg.text(svg.width - 200, ly, regime_name(s.regime), 12);
    ly += 18;
  }
  write_file(path, svg.finish());
}

}  // namespace

void write_report(const EfficiencyReport& rep, const std::string& dir) {
  std::filesystem::create_directories(dir);

  // Per-language scores.
  {
    std::string out =
        "order\tseed\tregime\tpredictability\tparsability\tpred_z\tparse_z\t"
        "sentences\twords\tfailures\n";
    for (std::size_t i = 0; i < rep.scores.size(); ++i) {
      const LanguageScore& s = rep.scores[i];
      out += std::to_string(s.language.word_order_id) + "\t" +
             std::to_string(s.language.seed) + "\t" +
             regime_name(s.language.regime) + "\t" +
             format_double(s.predictability) + "\t" +
             format_double(s.parsability) + "\t" + format_double(rep.pred_z[i]) +
             "\t" + format_double(rep.parse_z[i]) + "\t" +
             std::to_string(s.sentences) + "\t" + std::to_string(s.words) + "\t" +
             std::to_string(s.failures) + "\n";
    }
    write_file(dir + "/scores.tsv", out);
  }

  {
    std::string out = "regime\tlambda\tmean\tlower\tupper\n";
    for (const RegimeStats& st : rep.regimes)
      for (std::size_t i = 0; i < st.band.lambda.size(); ++i)
        out += std::string(regime_name(st.regime)) + "\t" +
               format_double(st.band.lambda[i]) + "\t" +
               format_double(st.band.mean[i]) + "\t" +
               format_double(st.band.lower[i]) + "\t" +
               format_double(st.band.upper[i]) + "\n";
    write_file(dir + "/bands.tsv", out);
  }

  {
    std::string out = "metric\tregime_a\tregime_b\tt\tdf\tp\talpha\tsignificant\n";
    for (const RegimePairTests& t : rep.tests) {
      out += std::string("predictability\t") + regime_name(t.a) + "\t" +
             regime_name(t.b) + "\t" + format_double(t.predictability.t) + "\t" +
             std::to_string(t.predictability.df) + "\t" +
             format_double(t.predictability.p) + "\t" +
             format_double(t.predictability.alpha) + "\t" +
             (t.predictability.significant ? "1" : "0") + "\n";
      out += std::string("parsability\t") + regime_name(t.a) + "\t" +
             regime_name(t.b) + "\t" + format_double(t.parsability.t) + "\t" +
             std::to_string(t.parsability.df) + "\t" +
             format_double(t.parsability.p) + "\t" +
             format_double(t.parsability.alpha) + "\t" +
             (t.parsability.significant ? "1" : "0") + "\n";
    }
    write_file(dir + "/ttests.tsv", out);
  }

  {
    std::string out = "regime_a\tregime_b\twhich\tlambda\n";
    for (const RegimePairCrossings& c : rep.crossings)
      for (const Crossing& x : c.crossings)
        out += std::string(regime_name(c.a)) + "\t" + regime_name(c.b) + "\t" +
               x.which + "\t" + format_double(x.lambda) + "\n";
    write_file(dir + "/intersections.tsv", out);
  }

  {
    std::string out = "regime\tmetric\tslope\tintercept\tslope_se\tn\n";
    for (const RegimeStats& st : rep.regimes) {
      out += std::string(regime_name(st.regime)) + "\tpredictability\t" +
             format_double(st.pred_regression.slope) + "\t" +
             format_double(st.pred_regression.intercept) + "\t" +
             format_double(st.pred_regression.slope_se) + "\t" +
             std::to_string(st.pred_regression.n) + "\n";
      out += std::string(regime_name(st.regime)) + "\tparsability\t" +
             format_double(st.parse_regression.slope) + "\t" +
             format_double(st.parse_regression.intercept) + "\t" +
             format_double(st.parse_regression.slope_se) + "\t" +
             std::to_string(st.parse_regression.n) + "\n";
    }
    write_file(dir + "/regression.tsv", out);
  }

  {
    std::ostringstream out;
    out << "coordlab efficiency report\n";
    out << "==========================\n\n";
    out << "languages scored: " << rep.scores.size() << "\n\n";
    out << "means (nats/word):\n";
    for (const RegimeStats& st : rep.regimes)
      out << "  " << regime_name(st.regime)
          << ": predictability " << format_double(st.mean_predictability)
          << ", parsability " << format_double(st.mean_parsability)
          << " (languages " << st.languages << ", beam failures " << st.failures
          << ")\n";
    out << "\npaired t-tests (alpha = " << format_double(rep.alpha) << "):\n";
    for (const RegimePairTests& t : rep.tests) {
      out << "  predictability " << regime_name(t.a) << " vs " << regime_name(t.b)
          << ": t=" << format_double(t.predictability.t)
          << " p=" << format_double(t.predictability.p)
          << (t.predictability.significant ? " (significant)" : "") << "\n";
      out << "  parsability    " << regime_name(t.a) << " vs " << regime_name(t.b)
          << ": t=" << format_double(t.parsability.t)
          << " p=" << format_double(t.parsability.p)
          << (t.parsability.significant ? " (significant)" : "") << "\n";
    }
    out << "\nstructure-reduction dominance interval (95% CI): ";
    if (rep.dominance_lo <= rep.dominance_hi)
      out << "[" << format_double(rep.dominance_lo) << ", "
          << format_double(rep.dominance_hi) << "]\n";
    else
      out << "(empty)\n";
    out << "\nposition regressions (slope, se):\n";
    for (const RegimeStats& st : rep.regimes)
      out << "  " << regime_name(st.regime) << ": predictability "
          << format_double(st.pred_regression.slope) << " ("
          << format_double(st.pred_regression.slope_se) << "), parsability "
          << format_double(st.parse_regression.slope) << " ("
          << format_double(st.parse_regression.slope_se) << ")\n";
    write_file(dir + "/report.txt", out.str());
  }

  write_efficiency_svg(rep, dir + "/efficiency.svg");
  write_bars_svg(rep, true, dir + "/predictability.svg");
  write_bars_svg(rep, false, dir + "/parsability.svg");
  write_position_svg(rep, true, dir + "/position_predictability.svg");
  write_position_svg(rep, false, dir + "/position_parsability.svg");
}

}  // namespace coordlab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coordlab/decoder.hpp"
#include "coordlab/efficiency.hpp"
#include "coordlab/error.hpp"
#include "coordlab/exact_scorer.hpp"
#include "coordlab/grammar.hpp"
#include "coordlab/sampler.hpp"

using namespace coordlab;

TEST_CASE("z transform of {1,2,3}") {
  auto z = z_transform({1, 2, 3});
  CHECK(z[0] == doctest::Approx(-1.2247448).epsilon(1e-6));
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(1.2247448).epsilon(1e-6));

  // Idempotent on standardized data, affine invariant in general.
  auto z2 = z_transform(z);
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(z2[i] == doctest::Approx(z[i]).epsilon(1e-12));

  Rng rng(5);
  std::vector<double> raw, affine;
  for (int i = 0; i < 50; ++i) {
    double v = rng.next_double();
    raw.push_back(v);
    affine.push_back(-3.7 * v + 11.0);
  }
  auto za = z_transform(raw);
  auto zb = z_transform(affine);
  for (std::size_t i = 0; i < za.size(); ++i)
    CHECK(zb[i] == doctest::Approx(-za[i]).epsilon(1e-9));  // sign flips with scale

  CHECK_THROWS_AS(z_transform({2, 2, 2}), Error);
}

TEST_CASE("omega endpoints and midpoint") {
  CHECK(omega(0.3, -0.8, 1.0) == doctest::Approx(0.3));
  CHECK(omega(0.3, -0.8, 0.0) == doctest::Approx(-0.8));
  CHECK(omega(1.0, -1.0, 0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(omega(0, 0, 1.5), Error);
  CHECK_THROWS_AS(omega(0, 0, -0.1), Error);
}

TEST_CASE("omega is linear in lambda for every language") {
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    double p = rng.next_double() * 4 - 2;
    double q = rng.next_double() * 4 - 2;
    double at0 = omega(p, q, 0.0);
    double at1 = omega(p, q, 1.0);
    for (int k = 0; k <= 10; ++k) {
      double l = k / 10.0;
      CHECK(omega(p, q, l) ==
            doctest::Approx(at0 + (at1 - at0) * l).epsilon(1e-12));
    }
  }
}

TEST_CASE("ci band degenerate and closed-form cases") {
  std::vector<std::pair<double, double>> same(5, {0.7, -0.2});
  CiBand zero = ci_band(same, 11);
  for (std::size_t i = 0; i < zero.lambda.size(); ++i) {
    CHECK(zero.upper[i] == doctest::Approx(zero.lower[i]).epsilon(1e-12));
    CHECK(zero.mean[i] ==
          doctest::Approx(omega(0.7, -0.2, zero.lambda[i])).epsilon(1e-12));
  }

  // Two languages whose omega values at some lambda are {0, 2}: sample sd
  // sqrt(2), SE 1, half-width 1.96.
  std::vector<std::pair<double, double>> two{{0.0, 0.0}, {2.0, 2.0}};
  CiBand band = ci_band(two, 3);
  for (std::size_t i = 0; i < band.lambda.size(); ++i) {
    CHECK(band.mean[i] == doctest::Approx(1.0));
    CHECK(band.upper[i] - band.mean[i] == doctest::Approx(1.96).epsilon(1e-12));
  }

  // At lambda = 0 the band width reduces to the parsability SE.
  std::vector<std::pair<double, double>> mixed{{0.1, -1.0}, {0.4, 0.5}, {-0.2, 0.8}};
  CiBand m = ci_band(mixed, 5);
  std::vector<double> parse{-1.0, 0.5, 0.8};
  double mean = (parse[0] + parse[1] + parse[2]) / 3.0;
  double var = 0.0;
  for (double v : parse) var += (v - mean) * (v - mean);
  var /= 2.0;
  CHECK(m.upper[0] - m.mean[0] ==
        doctest::Approx(1.96 * std::sqrt(var / 3.0)).epsilon(1e-12));
}

TEST_CASE("ci intersections of two lines cross at one half") {
  CiBand a, b;
  for (int i = 0; i <= 100; ++i) {
    double l = i / 100.0;
    a.lambda.push_back(l);
    b.lambda.push_back(l);
    a.lower.push_back(l);         // a.lower = lambda
    a.upper.push_back(l + 10.0);  // far away, no second crossing
    b.upper.push_back(1.0 - l);   // b.upper = 1 - lambda
    b.lower.push_back(-10.0);
    a.mean.push_back(l);
    b.mean.push_back(0.0);
  }
  auto crossings = ci_intersections(a, b);
  REQUIRE(crossings.size() == 1);
  CHECK(crossings[0].lambda == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(crossings[0].which == "a.lower/b.upper");

  // Disjoint bands produce no crossings.
  CiBand c = b;
  for (auto& v : c.upper) v = -20.0;
  for (auto& v : c.lower) v = -30.0;
  CHECK(ci_intersections(a, c).empty());
}

TEST_CASE("paired t test matches the textbook example") {
  PairedTest r = paired_tests({2, 4, 6}, {1, 2, 3});
  CHECK(r.t == doctest::Approx(3.4641016).epsilon(1e-6));
  CHECK(r.df == 2);
  CHECK(r.p == doctest::Approx(0.0742).epsilon(1e-2));
  CHECK(!r.significant);  // 0.0742 > 0.05/3

  // Antisymmetry.
  PairedTest s = paired_tests({1, 2, 3}, {2, 4, 6});
  CHECK(s.t == doctest::Approx(-r.t).epsilon(1e-12));
  CHECK(s.p == doctest::Approx(r.p).epsilon(1e-12));

  CHECK_THROWS_AS(paired_tests({1, 2, 3}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(paired_tests({1, 2}, {1}), Error);
}

TEST_CASE("position regression closed forms") {
  Regression r = position_regression({{1, 1}, {2, 2}, {3, 3}});
  CHECK(r.slope == doctest::Approx(1.0));
  CHECK(r.intercept == doctest::Approx(0.0));
  CHECK(r.slope_se == doctest::Approx(0.0));

  Regression flat = position_regression({{1, 4}, {2, 4}, {3, 4}});
  CHECK(flat.slope == doctest::Approx(0.0));

  CHECK_THROWS_AS(position_regression({{1, 1}, {1, 2}, {1, 3}}), Error);
  CHECK_THROWS_AS(position_regression({{1, 1}, {2, 2}}), Error);
}

TEST_CASE("score_language arithmetic and bounds") {
  SentenceMeasures m;
  m.surprisal = {std::log(2.0), std::log(2.0)};
  m.best_posterior = {0.0, 0.0};
  LanguageScore s = score_language(LanguageSpec{}, {m});
  CHECK(s.predictability == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  CHECK(s.parsability == doctest::Approx(0.0));
  CHECK(s.words == 2);

  // Deterministic language scored exactly.
  Pcfg g = grammar_from_string("# start S\n1\tS\tA B\n1\tA\t::a\n1\tB\t::b\n");
  PcfgActionScorer exact(g);
  std::vector<SentenceMeasures> ms{word_sync_beam(exact, {"a", "b"})};
  LanguageScore det = score_language(LanguageSpec{}, ms);
  CHECK(det.parsability == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(det.predictability == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("monte carlo predictability approaches the analytic value") {
  // Finite language: p(a c)=.35, p(a d)=.15, p(b c)=.35, p(b d)=.15.
  Pcfg g = grammar_from_string(
      "# start S\n1\tS\tA B\n0.5\tA\t::a\n0.5\tA\t::b\n0.7\tB\t::c\n0.3\tB\t::d\n");
  double h = -(0.35 * std::log(0.35) * 2 + 0.15 * std::log(0.15) * 2);
  double expected = -h / 2.0;  // per word

  PcfgActionScorer exact(g);
  Corpus c = generate_corpus(g, 10000, 31);
  std::vector<SentenceMeasures> ms;
  for (const auto& e : c.entries) ms.push_back(word_sync_beam(exact, e.sentence));
  LanguageScore s = score_language(c.language, ms);
  CHECK(s.predictability == doctest::Approx(expected).epsilon(0.03));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coordlab/decoder.hpp"
#include "coordlab/error.hpp"
#include "coordlab/grammar.hpp"
#include "coordlab/ngram_model.hpp"
#include "coordlab/oracle.hpp"
#include "coordlab/sampler.hpp"
#include "coordlab/transforms.hpp"
#include "coordlab/util.hpp"
#include "test_util.hpp"

using namespace coordlab;

namespace {

Pcfg ambiguous_toy() {
  return grammar_from_string(
      "# start S\n0.3\tS\tS S\n0.2\tS\tS X\n0.5\tS\t::a\n1\tX\t::a\n");
}

std::vector<ActionSequence> oracles(const Corpus& c, Split split) {
  std::vector<ActionSequence> out;
  for (const auto& e : c.entries)
    if (e.split == split) out.push_back(tree_to_actions(e.tree));
  return out;
}

}  // namespace

TEST_CASE("oversized beams reproduce exhaustive measures exactly") {
  Pcfg g = ambiguous_toy();
  BeamConfig huge;
  huge.action_beam = 200000;
  huge.word_beam = 200000;

  PcfgActionScorer exact(g);
  for (int n = 1; n <= 5; ++n) {
    std::vector<std::string> sentence(n, "a");
    SentenceMeasures ex = exhaustive_measures(exact, sentence);
    SentenceMeasures beam = word_sync_beam(exact, sentence, huge);
    REQUIRE(!ex.failed);
    REQUIRE(!beam.failed);
    for (int i = 0; i < n; ++i) {
      CHECK(beam.surprisal[i] == doctest::Approx(ex.surprisal[i]).epsilon(1e-9));
      CHECK(beam.best_posterior[i] ==
            doctest::Approx(ex.best_posterior[i]).epsilon(1e-9));
    }
    CHECK(beam.best_tree == ex.best_tree);
  }

  // Same equivalence under a trained n-gram scorer. The n-gram admits any
  // open label anywhere, so a one-label grammar and tight caps keep the
  // space enumerable.
  Pcfg g2 = grammar_from_string("# start S\n0.4\tS\tS S\n0.6\tS\t::a\n");
  Corpus c = generate_corpus(g2, 300, 3);
  ActionNgramModel m =
      train_action_model(oracles(c, Split::Train), {}, ActionVocab::from_grammar(g2));
  ActionCaps tight;
  tight.max_open = 6;
  tight.max_consecutive_structural = 8;
  NgramActionScorer ngram(&m, tight);
  for (int n = 1; n <= 4; ++n) {
    std::vector<std::string> sentence(n, "a");
    SentenceMeasures ex = exhaustive_measures(ngram, sentence, 4000000);
    SentenceMeasures beam = word_sync_beam(ngram, sentence, huge);
    for (int i = 0; i < n; ++i) {
      CHECK(beam.surprisal[i] == doctest::Approx(ex.surprisal[i]).epsilon(1e-9));
      CHECK(beam.best_posterior[i] ==
            doctest::Approx(ex.best_posterior[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("surprisals over a finite language are a proper distribution") {
  Pcfg g = grammar_from_string(
      "# start S\n1\tS\tA B\n0.5\tA\t::a\n0.5\tA\t::b\n0.7\tB\t::c\n0.3\tB\t::d\n");
  PcfgActionScorer exact(g);
  double total = 0.0;
  for (const std::string& x : {"a", "b"})
    for (const std::string& y : {"c", "d"}) {
      SentenceMeasures sm = exhaustive_measures(exact, {x, y});
      REQUIRE(!sm.failed);
      double lp = 0.0;
      for (double s : sm.surprisal) lp -= s;
      total += std::exp(lp);
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("single-parse languages have zero posteriors and perfect recovery") {
  Pcfg g = grammar_from_string(
      "# start S\n1\tS\tA B\n1\tA\t::a\n1\tB\t::b\n");
  PcfgActionScorer exact(g);
  SentenceMeasures sm = word_sync_beam(exact, {"a", "b"});
  REQUIRE(!sm.failed);
  for (double p : sm.best_posterior) CHECK(p == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tree_to_sexpr(sm.best_tree) == "(S (A a) (B b))");
  CHECK(bracket_f1(tree_from_sexpr("(S (A a) (B b))"), sm.best_tree) ==
        doctest::Approx(1.0));
}

TEST_CASE("two-parse sentence has the textbook final posterior") {
  Pcfg g = grammar_from_string(
      "# start S\n0.75\tS\tA B\n0.25\tS\tC D\n1\tA\t::a\n1\tB\t::b\n1\tC\t::a\n1\tD\t::b\n");
  PcfgActionScorer exact(g);
  SentenceMeasures sm = exhaustive_measures(exact, {"a", "b"});
  REQUIRE(!sm.failed);
  CHECK(sm.best_posterior.back() == doctest::Approx(std::log(0.75)).epsilon(1e-9));
  // Surprisals telescope to the full sentence probability.
  double lp = 0.0;
  for (double s : sm.surprisal) lp -= s;
  CHECK(lp == doctest::Approx(0.0).epsilon(1e-9));  // p("a b") = 1
}

TEST_CASE("beam mass never decreases with larger beams") {
  Pcfg g = build_base_grammar(40);
  Corpus c = generate_corpus(g, 400, 8);
  ActionNgramModel m =
      train_action_model(oracles(c, Split::Train), {}, ActionVocab::from_grammar(g));
  NgramActionScorer ngram(&m);

  BeamConfig small;
  small.action_beam = 10;
  small.word_beam = 2;
  BeamConfig big;
  big.action_beam = 100;
  big.word_beam = 10;

  int checked = 0;
  for (const auto& e : c.entries) {
    if (e.split != Split::Test || e.sentence.size() > 10) continue;
    SentenceMeasures a = word_sync_beam(ngram, e.sentence, small);
    SentenceMeasures b = word_sync_beam(ngram, e.sentence, big);
    if (a.failed || b.failed) continue;
    double ca = 0.0, cb = 0.0;
    for (std::size_t i = 0; i < e.sentence.size(); ++i) {
      ca -= a.surprisal[i];
      cb -= b.surprisal[i];
      CHECK(cb >= ca - 1e-9);
    }
    if (++checked >= 12) break;
  }
  CHECK(checked >= 8);
}

TEST_CASE("decoding is deterministic") {
  Pcfg g = build_base_grammar(40);
  Corpus c = generate_corpus(g, 200, 4);
  ActionNgramModel m =
      train_action_model(oracles(c, Split::Train), {}, ActionVocab::from_grammar(g));
  NgramActionScorer ngram(&m);
  const auto& sentence = c.entries[3].sentence;
  SentenceMeasures a = word_sync_beam(ngram, sentence);
  SentenceMeasures b = word_sync_beam(ngram, sentence);
  CHECK(a.surprisal == b.surprisal);
  CHECK(a.best_posterior == b.best_posterior);
  CHECK(a.best_tree == b.best_tree);
}

TEST_CASE("beam death sets the failure flag and floor values") {
  Pcfg g = grammar_from_string(
      "# start S\n1\tS\tA B\n1\tA\t::a\n1\tB\t::b\n");
  PcfgActionScorer exact(g);
  SentenceMeasures sm = word_sync_beam(exact, {"b", "a"});
  CHECK(sm.failed);
  CHECK(sm.failed_at_word == 0);
  for (double s : sm.surprisal) CHECK(s == doctest::Approx(-std::log(1e-12)));
  for (double p : sm.best_posterior) CHECK(p == doctest::Approx(std::log(1e-12)));
  CHECK_THROWS_AS(best_parse(exact, {"b", "a"}), Error);
}

TEST_CASE("beam surprisals stay close to the exact inside probability") {
  Pcfg g = build_base_grammar(60);
  Corpus c = generate_corpus(g, 300, 15);
  ExactPcfgScorer inside(g);
  PcfgActionScorer exact(g);
  int checked = 0;
  for (const auto& e : c.entries) {
    if (e.split != Split::Test || e.sentence.size() > 14) continue;
    SentenceMeasures sm = word_sync_beam(exact, e.sentence);
    if (sm.failed) continue;
    double lp = 0.0;
    for (double s : sm.surprisal) lp -= s;
    double exact_lp = inside.inside_logprob(e.sentence);
    CHECK(lp <= exact_lp + 1e-9);  // beam mass is a lower bound
    CHECK(exact_lp - lp < 0.5);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("trained model recovers structure with useful accuracy") {
  Pcfg g = build_base_grammar(60);
  Corpus c = generate_corpus(g, 2000, 6);
  ActionNgramModel m =
      train_action_model(oracles(c, Split::Train), {}, ActionVocab::from_grammar(g));
  NgramActionScorer ngram(&m);

  BeamConfig greedy;
  greedy.action_beam = 1;
  greedy.word_beam = 1;
  BeamConfig standard;

  double f1_greedy = 0.0, f1_standard = 0.0;
  int n = 0;
  for (const auto& e : c.entries) {
    if (e.split != Split::Test || e.sentence.size() > 12) continue;
    SentenceMeasures big = word_sync_beam(ngram, e.sentence, standard);
    SentenceMeasures small = word_sync_beam(ngram, e.sentence, greedy);
    if (big.failed || small.failed) continue;
    f1_standard += bracket_f1(e.tree, big.best_tree);
    f1_greedy += bracket_f1(e.tree, small.best_tree);
    if (++n >= 40) break;
  }
  REQUIRE(n >= 30);
  f1_standard /= n;
  f1_greedy /= n;
  CHECK(f1_standard >= 0.75);
  CHECK(f1_greedy <= f1_standard + 1e-9);
}

TEST_CASE("measures files round trip") {
  Pcfg g = ambiguous_toy();
  PcfgActionScorer exact(g);
  std::vector<SentenceMeasures> ms;
  std::vector<std::vector<std::string>> sents;
  for (int n = 1; n <= 3; ++n) {
    sents.push_back(std::vector<std::string>(n, "a"));
    ms.push_back(word_sync_beam(exact, sents.back()));
  }
  std::string path = "measures_test_tmp.tsv";
  save_measures(ms, sents, path);
  MeasuresFile f = load_measures(path);
  REQUIRE(f.measures.size() == ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CHECK(f.sentences[i] == sents[i]);
    for (std::size_t w = 0; w < sents[i].size(); ++w) {
      CHECK(f.measures[i].surprisal[w] == ms[i].surprisal[w]);
      CHECK(f.measures[i].best_posterior[w] == ms[i].best_posterior[w]);
    }
  }
  std::remove(path.c_str());
}

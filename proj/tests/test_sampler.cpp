#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "coordlab/error.hpp"
#include "coordlab/grammar.hpp"
#include "coordlab/sampler.hpp"

using namespace coordlab;

TEST_CASE("deterministic grammar samples its only tree") {
  Pcfg g = grammar_from_string("# start S\n1\tS\t::a\n");
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    Tree t = sample_tree(g, rng);
    CHECK(tree_to_sexpr(t) == "(S a)");
  }
}

TEST_CASE("two-way choice matches binomial expectation") {
  Pcfg g = grammar_from_string("# start S\n0.5\tS\t::a\n0.5\tS\t::b\n");
  Rng rng(123);
  int a = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i)
    if (tree_yield(sample_tree(g, rng))[0] == "a") ++a;
  double prop = static_cast<double>(a) / n;
  CHECK(prop > 0.48);
  CHECK(prop < 0.52);
}

TEST_CASE("NP coordination frequency tracks its rule probability") {
  Pcfg g = build_base_grammar(60);
  Rng rng(99);
  long np_expansions = 0, np_coord = 0;
  auto walk = [&](const Tree& t, auto&& self) -> void {
    if (t.leaf) return;
    if (t.label == "NP") {
      ++np_expansions;
      if (t.children.size() == 3 && t.children[1].label == "CC") ++np_coord;
    }
    for (const Tree& c : t.children) self(c, self);
  };
  while (np_expansions < 100000) {
    Tree t = sample_tree(g, rng);
    walk(t, walk);
  }
  double freq = static_cast<double>(np_coord) / np_expansions;
  CHECK(std::fabs(freq - 0.10) < 0.01);
}

TEST_CASE("generate_corpus is deterministic and seed-sensitive") {
  Pcfg g = build_base_grammar(40);
  Corpus c1 = generate_corpus(g, 200, 11);
  Corpus c2 = generate_corpus(g, 200, 11);
  CHECK(corpus_to_string(c1) == corpus_to_string(c2));

  Corpus c3 = generate_corpus(g, 200, 12);
  CHECK(corpus_to_string(c1) != corpus_to_string(c3));

  // Pure function of the grammar bytes: a reloaded grammar reproduces it.
  Pcfg h = grammar_from_string(grammar_to_string(g));
  Corpus c4 = generate_corpus(h, 200, 11);
  CHECK(corpus_to_string(c4) == corpus_to_string(c1));
}

TEST_CASE("split sizes are exactly 8-1-1") {
  Pcfg g = build_base_grammar(40);
  Corpus c = generate_corpus(g, 20000, 5);
  int train = 0, dev = 0, test = 0;
  for (const auto& e : c.entries) {
    if (e.split == Split::Train) ++train;
    if (e.split == Split::Dev) ++dev;
    if (e.split == Split::Test) ++test;
  }
  CHECK(train == 16000);
  CHECK(dev == 2000);
  CHECK(test == 2000);
}

TEST_CASE("corpus size precondition") {
  Pcfg g = build_base_grammar(40);
  CHECK_THROWS_AS(generate_corpus(g, 9, 1), ConfigError);
}

TEST_CASE("sentences always equal tree yields") {
  Pcfg g = build_base_grammar(40);
  Corpus c = generate_corpus(g, 500, 3);
  for (const auto& e : c.entries) CHECK(e.sentence == tree_yield(e.tree));
}

TEST_CASE("corpus stats on a single-sentence corpus") {
  Corpus c;
  CorpusEntry e;
  e.tree = tree_from_sexpr("(S a)");
  e.sentence = tree_yield(e.tree);
  c.entries.push_back(e);
  CorpusStats s = corpus_stats(c);
  CHECK(s.mean_length == doctest::Approx(1.0));
  CHECK(s.median_length == doctest::Approx(1.0));
  CHECK(s.sentences == 1);
}

TEST_CASE("empirical mean length matches the expectation solve within 5%") {
  Pcfg g = build_base_grammar(1254);
  double expected = expected_sentence_length(g);
  Corpus c = generate_corpus(g, 10000, 17);
  CorpusStats s = corpus_stats(c);
  CHECK(std::fabs(s.mean_length - expected) / expected < 0.05);
}

TEST_CASE("runaway grammars hit the rejection limit") {
  // Every expansion recurses, so every draw exceeds the depth cap.
  Pcfg g = grammar_from_string("# start S\n1\tS\tS S\n");
  Rng rng(1);
  SampleLimits limits;
  limits.max_depth = 12;
  limits.max_consecutive_rejections = 50;
  int rejections = 0;
  CHECK_THROWS_AS(sample_tree(g, rng, limits, &rejections), Error);
  CHECK(rejections > 50);
}

TEST_CASE("corpus serialization round trips byte-stably") {
  Pcfg g = build_base_grammar(40);
  Corpus c = generate_corpus(g, 50, 2);
  std::string s1 = corpus_to_string(c);
  Corpus d = corpus_from_string(s1);
  CHECK(corpus_to_string(d) == s1);
  CHECK(d.language.word_order_id == c.language.word_order_id);
  CHECK(d.entries.size() == c.entries.size());
}

TEST_CASE("corpus loader rejects yield mismatches") {
  std::string bad = "train\ta b\t(S (NP a) (VP c))\n";
  CHECK_THROWS_AS(corpus_from_string(bad), ConfigError);
}

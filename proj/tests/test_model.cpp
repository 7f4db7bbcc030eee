#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "coordlab/error.hpp"
#include "coordlab/exact_scorer.hpp"
#include "coordlab/grammar.hpp"
#include "coordlab/ngram_model.hpp"
#include "coordlab/oracle.hpp"
#include "coordlab/sampler.hpp"
#include "coordlab/util.hpp"
#include "test_util.hpp"

using namespace coordlab;

namespace {

std::vector<ActionSequence> corpus_oracles(const Corpus& c, Split split) {
  std::vector<ActionSequence> out;
  for (const auto& e : c.entries)
    if (e.split == split) out.push_back(tree_to_actions(e.tree));
  return out;
}

}  // namespace

TEST_CASE("Witten-Bell interpolation matches hand arithmetic") {
  // 100 bigram events after h: 60x a, 40x b.
  std::vector<ActionSequence> data;
  for (int i = 0; i < 60; ++i) data.push_back({Action::gen("h"), Action::gen("a")});
  for (int i = 0; i < 40; ++i) data.push_back({Action::gen("h"), Action::gen("b")});
  NgramConfig cfg;
  cfg.order = 2;
  ActionNgramModel m = train_action_model(data, cfg);

  std::int32_t id_h = m.vocab().find_gen("h");
  std::int32_t id_a = m.vocab().find_gen("a");
  REQUIRE(id_h >= 0);
  REQUIRE(id_a >= 0);

  // Unigram: counts h:100 a:60 b:40 END:100, N=300, T=4, V=5.
  double p1_a = (60.0 + 4.0 / 5.0) / (300.0 + 4.0);
  // Bigram: context [h]: counts {a:60, b:40}, N=100, T=2.
  double want = (60.0 + 2.0 * p1_a) / (100.0 + 2.0);
  CHECK(m.raw_prob({id_h}, id_a) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("two equally frequent continuations split the mass") {
  std::vector<ActionSequence> data;
  for (int i = 0; i < 50; ++i) data.push_back({Action::gen("h"), Action::gen("a")});
  for (int i = 0; i < 50; ++i) data.push_back({Action::gen("h"), Action::gen("b")});
  NgramConfig cfg;
  cfg.order = 2;
  ActionNgramModel m = train_action_model(data, cfg);
  double pa = m.raw_prob({m.vocab().find_gen("h")}, m.vocab().find_gen("a"));
  double pb = m.raw_prob({m.vocab().find_gen("h")}, m.vocab().find_gen("b"));
  CHECK(pa == doctest::Approx(pb).epsilon(1e-12));
  CHECK(std::fabs(pa - 0.5) < 0.02);
}

TEST_CASE("a single repeated sequence concentrates the model") {
  ActionSequence seq = tree_to_actions(tree_from_sexpr("(S (NP a) (VP b))"));
  std::vector<ActionSequence> data(50, seq);
  ActionNgramModel m = train_action_model(data, {});
  GroupLegal all;
  all.gen = all.open = all.reduce = all.end = true;
  std::vector<std::int32_t> ctx;
  double logp = 0.0;
  for (const Action& a : seq) {
    std::int32_t id = m.vocab().id_of(a);
    logp += m.logprob(ctx, id, all);
    ctx.push_back(id);
  }
  logp += m.logprob(ctx, ActionVocab::kEnd, all);
  CHECK(std::exp(logp) > 0.7);
}

TEST_CASE("smoothed distribution is normalized over the action universe") {
  Pcfg g = build_base_grammar(30);
  Corpus c = generate_corpus(g, 300, 21);
  ActionNgramModel m = train_action_model(corpus_oracles(c, Split::Train), {},
                                          ActionVocab::from_grammar(g));
  GroupLegal all;
  all.gen = all.open = all.reduce = all.end = true;

  Rng rng(77);
  std::size_t v = m.vocab().size();
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::int32_t> ctx;
    int len = static_cast<int>(rng.next_u64() % 5);
    for (int i = 0; i < len; ++i)
      ctx.push_back(static_cast<std::int32_t>(rng.next_u64() % v));
    double sum = 0.0;
    for (std::size_t id = 0; id < v; ++id) {
      if (id == ActionVocab::kBos) continue;
      sum += std::exp(m.logprob(ctx, static_cast<std::int32_t>(id), all));
    }
    CHECK(std::fabs(sum - 1.0) < 1e-6);
  }

  // Partial legal sets renormalize exactly as well.
  GroupLegal open_reduce;
  open_reduce.open = open_reduce.reduce = true;
  std::vector<std::int32_t> ctx{m.vocab().find_gen("noun.0")};
  double sum = std::exp(m.logprob(ctx, ActionVocab::kReduce, open_reduce));
  for (std::int32_t id : m.vocab().open_ids())
    sum += std::exp(m.logprob(ctx, id, open_reduce));
  CHECK(std::fabs(sum - 1.0) < 1e-9);
}

TEST_CASE("fully unseen history and actions fall back to uniform over the legal set") {
  ActionVocab vocab;
  vocab.intern_open("X");
  vocab.intern_open("Y");
  vocab.intern_open("Z");
  std::vector<ActionSequence> data{{Action::gen("a"), Action::gen("b")}};
  ActionNgramModel m = train_action_model(data, {}, vocab);
  GroupLegal open_only;
  open_only.open = true;
  double lp = m.logprob({m.vocab().find_gen("a")}, m.vocab().find_open("Y"), open_only);
  CHECK(lp == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-9));
}

TEST_CASE("singleton legal sets score zero and illegal actions throw") {
  std::vector<ActionSequence> data{{Action::gen("a")}};
  ActionNgramModel m = train_action_model(data, {});
  GroupLegal reduce_only;
  reduce_only.reduce = true;
  CHECK(m.logprob({}, ActionVocab::kReduce, reduce_only) == 0.0);
  CHECK_THROWS_AS(m.logprob({}, m.vocab().find_gen("a"), reduce_only), Error);
}

TEST_CASE("held-out perplexity improves with training size") {
  Pcfg g = build_base_grammar(60);
  Corpus heldout = generate_corpus(g, 500, 1001);
  std::vector<ActionSequence> heldout_seqs;
  for (const auto& e : heldout.entries) heldout_seqs.push_back(tree_to_actions(e.tree));

  ActionVocab vocab = ActionVocab::from_grammar(g);
  std::vector<double> ppl;
  for (int n : {100, 1000, 16000}) {
    Corpus train = generate_corpus(g, n, 2002);
    std::vector<ActionSequence> seqs;
    for (const auto& e : train.entries) seqs.push_back(tree_to_actions(e.tree));
    ActionNgramModel m = train_action_model(seqs, {}, vocab);
    ppl.push_back(m.perplexity(heldout_seqs));
  }
  CHECK(ppl[1] < ppl[0]);
  CHECK(ppl[2] < ppl[1]);
}

TEST_CASE("model files round trip byte-stably") {
  Pcfg g = build_base_grammar(30);
  Corpus c = generate_corpus(g, 100, 5);
  ActionNgramModel m = train_action_model(corpus_oracles(c, Split::Train), {},
                                          ActionVocab::from_grammar(g));
  std::string s1 = m.to_string();
  ActionNgramModel m2 = ActionNgramModel::from_string(s1);
  CHECK(m2.to_string() == s1);
  // Spot-check probabilities agree.
  GroupLegal all;
  all.gen = all.open = all.reduce = all.end = true;
  std::vector<std::int32_t> ctx{m.vocab().find_gen("noun.0"),
                                m.vocab().find_open("NP")};
  for (std::int32_t id : {ActionVocab::kReduce, m.vocab().find_open("NP"),
                          m.vocab().find_gen("noun.1")})
    CHECK(m.logprob(ctx, id, all) == doctest::Approx(m2.logprob(ctx, id, all)).epsilon(1e-12));
}

TEST_CASE("training on nothing is an error") {
  CHECK_THROWS_AS(train_action_model({}, {}), Error);
}

// ---------------------------------------------------------------------------
// Exact scorer

TEST_CASE("inside probability on closed-form toys") {
  Pcfg g1 = grammar_from_string("# start S\n1\tS\t::a\n");
  ExactPcfgScorer s1(g1);
  CHECK(s1.inside_logprob({"a"}) == doctest::Approx(0.0));

  Pcfg g2 = grammar_from_string(
      "# start S\n0.5\tS\tX\n0.5\tS\tY\n1\tX\t::a\n1\tY\t::a\n");
  ExactPcfgScorer s2(g2);
  CHECK(s2.inside_logprob({"a"}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s2.forest_entropy({"a"}) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(s2.parse_count({"a"}) == doctest::Approx(2.0));
}

TEST_CASE("inside dominates any sampled parse") {
  Pcfg g = build_base_grammar(40);
  ExactPcfgScorer scorer(g);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Tree t = sample_tree(g, rng);
    auto sentence = tree_yield(t);
    if (sentence.size() > 12) continue;
    double inside = scorer.inside_logprob(sentence);
    double tree_lp = testutil::tree_logprob(g, t);
    CHECK(inside >= tree_lp - 1e-9);
  }
}

TEST_CASE("forest entropy and inside match brute-force enumeration") {
  // Deliberately ambiguous toy with unequal parse probabilities.
  Pcfg g = grammar_from_string(
      "# start S\n0.3\tS\tS S\n0.2\tS\tS X\n0.5\tS\t::a\n1\tX\t::a\n");
  ExactPcfgScorer scorer(g);
  for (int n = 1; n <= 6; ++n) {
    std::vector<std::string> sentence(n, "a");
    auto parses = testutil::enumerate_parses(g, sentence);
    REQUIRE(!parses.empty());
    std::vector<double> lps;
    for (const auto& p : parses) lps.push_back(p.logprob);
    double z = logsumexp(lps);
    double h = 0.0;
    for (double lp : lps) {
      double post = std::exp(lp - z);
      h -= post * (lp - z);
    }
    CHECK(scorer.inside_logprob(sentence) == doctest::Approx(z).epsilon(1e-9));
    CHECK(scorer.forest_entropy(sentence) == doctest::Approx(h).epsilon(1e-9));
    CHECK(scorer.parse_count(sentence) == doctest::Approx(double(parses.size())));
    // Maximum-entropy bound from the counting semiring.
    CHECK(scorer.forest_entropy(sentence) <=
          std::log(scorer.parse_count(sentence)) + 1e-9);
  }
}

TEST_CASE("sentence probabilities of a finite language sum to one") {
  Pcfg g = grammar_from_string(
      "# start S\n1\tS\tA B\n0.5\tA\t::a\n0.5\tA\t::b\n0.7\tB\t::c\n0.3\tB\t::d\n");
  ExactPcfgScorer scorer(g);
  double total = 0.0;
  for (const std::string& x : {"a", "b"})
    for (const std::string& y : {"c", "d"})
      total += std::exp(scorer.inside_logprob({x, y}));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scorer errors") {
  Pcfg g = grammar_from_string("# start S\n1\tS\t::a\n");
  ExactPcfgScorer s(g);
  CHECK_THROWS_WITH_AS(s.inside_logprob({"zzz"}), doctest::Contains("zzz"), Error);
  CHECK(s.inside_logprob({"a", "a"}) <= -1e200);
  CHECK_THROWS_AS(s.forest_entropy({"a", "a"}), Error);
}

TEST_CASE("tree binarization round trips") {
  Pcfg g = build_base_grammar(30);
  ExactPcfgScorer scorer(g);
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    Tree t = sample_tree(g, rng);
    CHECK(ExactPcfgScorer::debinarize_tree(scorer.binarize_tree(t)) == t);
  }
}

// ---------------------------------------------------------------------------
// PCFG prefix-probability action scorer

TEST_CASE("pcfg action scorer reproduces exact tree probabilities") {
  Pcfg g = build_base_grammar(30);
  PcfgActionScorer scorer(g);
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    Tree t = sample_tree(g, rng);
    ActionSequence seq = tree_to_actions(t);
    PcfgActionScorer::State st = scorer.initial();
    double total = 0.0;
    for (const Action& a : seq) {
      double lp;
      PcfgActionScorer::State next;
      REQUIRE(scorer.step(st, a, &lp, &next));
      total += lp;
      st = next;
    }
    double end = scorer.end_logprob(st);
    REQUIRE(end > -1e200);
    total += end;
    CHECK(total == doctest::Approx(testutil::tree_logprob(g, t)).epsilon(1e-9));
  }
}

TEST_CASE("pcfg action scorer conditionals are normalized at visited states") {
  Pcfg g = build_base_grammar(30);
  PcfgActionScorer scorer(g);
  std::vector<std::string> words;
  for (const auto& [cat, entries] : g.lexicon())
    for (const auto& e : entries) words.push_back(e.form);

  Rng rng(13);
  int states_checked = 0;
  for (int i = 0; i < 20 && states_checked < 120; ++i) {
    Tree t = sample_tree(g, rng);
    ActionSequence seq = tree_to_actions(t);
    PcfgActionScorer::State st = scorer.initial();
    for (const Action& a : seq) {
      double sum = 0.0;
      for (const std::string& w : words) {
        double lp;
        PcfgActionScorer::State next;
        if (scorer.step(st, Action::gen(w), &lp, &next)) sum += std::exp(lp);
      }
      for (const std::string& label : scorer.open_labels()) {
        double lp;
        PcfgActionScorer::State next;
        if (scorer.step(st, Action::open(label), &lp, &next)) sum += std::exp(lp);
      }
      {
        double lp;
        PcfgActionScorer::State next;
        if (scorer.step(st, Action::reduce(), &lp, &next)) sum += std::exp(lp);
      }
      double end = scorer.end_logprob(st);
      if (end > -1e200) sum += std::exp(end);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      ++states_checked;

      double lp;
      PcfgActionScorer::State next;
      REQUIRE(scorer.step(st, a, &lp, &next));
      st = next;
    }
  }
  CHECK(states_checked >= 120);
}

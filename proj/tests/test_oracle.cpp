#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coordlab/error.hpp"
#include "coordlab/grammar.hpp"
#include "coordlab/oracle.hpp"
#include "coordlab/sampler.hpp"
#include "coordlab/transforms.hpp"

using namespace coordlab;

TEST_CASE("in-order linearization of the two reference trees") {
  Tree t1 = tree_from_sexpr("(S (NP a) (VP b))");
  ActionSequence s1 = tree_to_actions(t1);
  ActionSequence want1{Action::gen("a"),  Action::open("NP"), Action::reduce(),
                       Action::open("S"), Action::gen("b"),   Action::open("VP"),
                       Action::reduce(),  Action::reduce()};
  CHECK(s1 == want1);

  Tree t2 = tree_from_sexpr("(S (NP a))");
  ActionSequence want2{Action::gen("a"), Action::open("NP"), Action::reduce(),
                       Action::open("S"), Action::reduce()};
  CHECK(tree_to_actions(t2) == want2);
}

TEST_CASE("round trip between trees and action sequences") {
  Pcfg g = build_base_grammar(60);
  Rng rng(777);
  for (int i = 0; i < 500; ++i) {
    Tree t = sample_tree(g, rng);
    ActionSequence a = tree_to_actions(t);
    CHECK(actions_to_tree(a) == t);

    std::size_t gens = 0, opens = 0, reduces = 0;
    for (const Action& act : a) {
      if (act.kind == ActionKind::Gen) ++gens;
      if (act.kind == ActionKind::Open) ++opens;
      if (act.kind == ActionKind::Reduce) ++reduces;
    }
    CHECK(gens == tree_yield(t).size());
    CHECK(opens == internal_node_count(t));
    CHECK(reduces == opens);
  }
}

TEST_CASE("gold sequences are legal at every step, transformed regimes included") {
  Pcfg g = build_base_grammar(60);
  Corpus base = generate_corpus(g, 300, 13);
  for (Regime r : {Regime::StructureReduction, Regime::NoReduction,
                   Regime::LinearReduction}) {
    Corpus c = regime_corpus(base, r);
    for (const auto& e : c.entries)
      CHECK(sequence_is_legal(tree_to_actions(e.tree)));
  }
}

TEST_CASE("initial state allows generation only") {
  ParseState st;
  LegalActions l = st.legal(ActionCaps{});
  CHECK(l.gen);
  CHECK(!l.open);
  CHECK(!l.reduce);
  CHECK(!l.finish);
}

TEST_CASE("completed root with no words expected is terminal") {
  ParseState st;
  ActionCaps caps;
  ParseState s2, s3, s4;
  REQUIRE(st.apply(Action::gen("a"), caps, &s2));
  REQUIRE(s2.apply(Action::open("S"), caps, &s3));
  REQUIRE(s3.apply(Action::reduce(), caps, &s4));
  CHECK(s4.at_completed_root("S"));
  LegalActions l = s4.legal(caps, 0, "S");
  CHECK(!l.gen);
  CHECK(!l.open);
  CHECK(!l.reduce);
  CHECK(l.finish);
  // Unconstrained, the tree may still grow upward, but generating a word
  // would strand the lone completed item.
  LegalActions l2 = s4.legal(caps, -1, "S");
  CHECK(l2.open);
  CHECK(!l2.gen);
  CHECK(l2.finish);
}

TEST_CASE("structural cap leaves generation only") {
  ActionCaps caps;
  caps.max_consecutive_structural = 1;
  ParseState st, s2, s3;
  REQUIRE(st.apply(Action::gen("a"), caps, &s2));
  REQUIRE(s2.apply(Action::open("X"), caps, &s3));
  CHECK(s3.consecutive_structural() == 1);
  LegalActions l = s3.legal(caps);
  CHECK(l.gen);
  CHECK(!l.open);
  CHECK(!l.reduce);
  // The cap blocks further structural actions outright.
  ParseState dead;
  CHECK(!s3.apply(Action::reduce(), caps, &dead));
}

TEST_CASE("decode errors carry positions") {
  CHECK_THROWS_WITH_AS(actions_to_tree({}), doctest::Contains("empty"), Error);

  ActionSequence premature{Action::gen("a"), Action::reduce()};
  CHECK_THROWS_WITH_AS(actions_to_tree(premature), doctest::Contains("action 1"), Error);

  ActionSequence no_left_corner{Action::gen("a"), Action::open("X"), Action::open("Y")};
  CHECK_THROWS_WITH_AS(actions_to_tree(no_left_corner), doctest::Contains("action 2"),
                       Error);

  ActionSequence leftover{Action::gen("a"), Action::gen("b")};
  CHECK_THROWS_WITH_AS(actions_to_tree(leftover), doctest::Contains("stack"), Error);
}

TEST_CASE("oracle file format round trips") {
  Tree t = tree_from_sexpr("(S (NP (Pronoun bo)) (VP (IVerb wandify)))");
  ActionSequence a = tree_to_actions(t);
  std::string line = actions_to_string(a);
  CHECK(line ==
        "GEN:bo OPEN:Pronoun REDUCE OPEN:NP REDUCE OPEN:S GEN:wandify "
        "OPEN:IVerb REDUCE OPEN:VP REDUCE REDUCE");
  CHECK(actions_from_string(line) == a);
  CHECK_THROWS_AS(actions_from_string("GEN:a FLY:b"), ConfigError);
}

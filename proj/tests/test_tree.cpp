#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coordlab/tree.hpp"

using namespace coordlab;

TEST_CASE("sexpr round trip") {
  std::string s = "(S (NP_Subj (NP (Pronoun bo)) (Subj sub)) (VP (IVerb wandify)))";
  Tree t = tree_from_sexpr(s);
  CHECK(tree_to_sexpr(t) == s);
  CHECK(tree_yield(t) == std::vector<std::string>{"bo", "sub", "wandify"});
  CHECK(internal_node_count(t) == 7);
}

TEST_CASE("yield order is left to right") {
  Tree t = tree_from_sexpr("(A (B x) (C (D y) (E z)) (F w))");
  CHECK(tree_yield(t) == std::vector<std::string>{"x", "y", "z", "w"});
}

TEST_CASE("equality is structural") {
  Tree a = tree_from_sexpr("(S (NP a) (VP b))");
  Tree b = tree_from_sexpr("(S (NP a) (VP b))");
  Tree c = tree_from_sexpr("(S (NP a) (VP c))");
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS(tree_from_sexpr("(S (NP a)"));
  CHECK_THROWS(tree_from_sexpr("(S) extra"));
  CHECK_THROWS(tree_from_sexpr("()"));
  CHECK_THROWS(tree_from_sexpr("word"));
}

TEST_CASE("depth") {
  CHECK(tree_depth(tree_from_sexpr("(S x)")) == 2);
  CHECK(tree_depth(tree_from_sexpr("(S (NP (N a)) (VP b))")) == 4);
}

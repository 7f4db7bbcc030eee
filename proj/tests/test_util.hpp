// Test-side oracles, independent of the library's chart/semiring code:
// brute-force parse enumeration by recursive span splitting, and direct
// tree probability under a grammar.
#ifndef COORDLAB_TESTS_TEST_UTIL_HPP
#define COORDLAB_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <string>
#include <vector>

#include "coordlab/grammar.hpp"
#include "coordlab/tree.hpp"

namespace coordlab::testutil {

struct EnumParse {
  Tree tree;
  double logprob;
};

// All ways to realize `symbols[pos..]` over sentence span [i, j).
inline void enumerate_rhs(const Pcfg& g, const std::vector<SymbolId>& symbols,
                          std::size_t pos, int i, int j,
                          const std::vector<std::string>& sentence,
                          std::vector<EnumParse> partial,
                          std::vector<std::vector<EnumParse>>* out);

inline std::vector<EnumParse> enumerate_symbol(const Pcfg& g, SymbolId sym, int i,
                                               int j,
                                               const std::vector<std::string>& sentence) {
  std::vector<EnumParse> results;
  if (g.symbol(sym).kind == SymbolKind::Terminal) {
    if (j == i + 1 && sentence[i] == g.name(sym))
      results.push_back({Tree::word(sentence[i]), 0.0});
    return results;
  }
  for (const Rule& r : g.rules()) {
    if (r.lhs != sym) continue;
    std::vector<std::vector<EnumParse>> combos;
    enumerate_rhs(g, r.rhs, 0, i, j, sentence, {}, &combos);
    for (const auto& children : combos) {
      Tree t;
      t.label = g.name(sym);
      double lp = std::log(r.prob);
      for (const EnumParse& c : children) {
        t.children.push_back(c.tree);
        lp += c.logprob;
      }
      results.push_back({std::move(t), lp});
    }
  }
  return results;
}

inline void enumerate_rhs(const Pcfg& g, const std::vector<SymbolId>& symbols,
                          std::size_t pos, int i, int j,
                          const std::vector<std::string>& sentence,
                          std::vector<EnumParse> partial,
                          std::vector<std::vector<EnumParse>>* out) {
  if (pos == symbols.size()) {
    if (i == j) out->push_back(std::move(partial));
    return;
  }
  // Each remaining symbol consumes at least one token (no nullables), and
  // the last one takes the whole remaining span.
  int remaining_after = static_cast<int>(symbols.size()) - static_cast<int>(pos) - 1;
  int lo = i + 1, hi = j - remaining_after;
  if (pos + 1 == symbols.size()) lo = hi = j;
  for (int k = lo; k <= hi; ++k) {
    if (k <= i) continue;
    for (EnumParse& p : enumerate_symbol(g, symbols[pos], i, k, sentence)) {
      auto next = partial;
      next.push_back(p);
      enumerate_rhs(g, symbols, pos + 1, k, j, sentence, std::move(next), out);
    }
  }
}

inline std::vector<EnumParse> enumerate_parses(const Pcfg& g,
                                               const std::vector<std::string>& sentence) {
  return enumerate_symbol(g, g.start(), 0, static_cast<int>(sentence.size()), sentence);
}

// Probability of one derivation under the grammar.
inline double tree_logprob(const Pcfg& g, const Tree& t) {
  if (t.leaf) return 0.0;
  double p = 0.0;
  SymbolId lhs = g.find(t.label);
  bool found = false;
  for (const Rule& r : g.rules()) {
    if (r.lhs != lhs || r.rhs.size() != t.children.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < r.rhs.size() && match; ++i) {
      const Tree& c = t.children[i];
      match = g.name(r.rhs[i]) == c.label;
    }
    if (match) {
      p = std::log(r.prob);
      found = true;
      break;
    }
  }
  if (!found) return -1e300;
  for (const Tree& c : t.children) {
    double lp = tree_logprob(g, c);
    if (lp <= -1e300) return -1e300;
    p += lp;
  }
  return p;
}

}  // namespace coordlab::testutil

#endif

#ifndef COORDLAB_EXACT_SCORER_HPP
#define COORDLAB_EXACT_SCORER_HPP

#include <memory>
#include <string>
#include <vector>

#include "coordlab/grammar.hpp"
#include "coordlab/oracle.hpp"
#include "coordlab/tree.hpp"

namespace coordlab {

// Exact chart scorer over a PCFG: marginal sentence probability (inside
// algorithm) and the conditional entropy of the parse forest, computed with
// a first-order expectation semiring over a binarized copy of the grammar.
// Rules longer than two symbols binarize through @-prefixed auxiliary
// symbols; the mapping is reversible at the tree level.
class ExactPcfgScorer {
 public:
  explicit ExactPcfgScorer(const Pcfg& g);

  // log p(sentence) = log of the summed probability of all parses; kNegInf
  // when the sentence is unparseable. Unknown words raise Error naming the
  // word.
  double inside_logprob(const std::vector<std::string>& sentence) const;

  // H(T | sentence) in nats, exact; throws on unparseable sentences.
  double forest_entropy(const std::vector<std::string>& sentence) const;

  // Number of parses, saturating at `cap`.
  double parse_count(const std::vector<std::string>& sentence,
                     double cap = 1e15) const;

  Tree binarize_tree(const Tree& t) const;
  static Tree debinarize_tree(const Tree& t);

  const Pcfg& grammar() const { return grammar_; }

 private:
  struct Item {
    double log_z = -1e300;
    double tbar = 0.0;  // expected log parse weight under the item posterior
    double count = 0.0;
  };
  struct BinRule {
    int lhs, left, right;
    double logp;
  };
  struct UnaRule {
    int lhs, child;
    double logp;
  };

  void run_chart(const std::vector<std::string>& sentence,
                 std::vector<std::vector<Item>>* chart, bool with_counts,
                 double count_cap) const;

  Pcfg grammar_;
  int nsym_ = 0;  // original symbols + auxiliaries
  std::vector<std::string> sym_names_;
  std::vector<BinRule> binary_;
  std::vector<UnaRule> unary_;          // child may be a terminal symbol
  std::vector<int> unary_order_;        // topological processing order
  std::vector<std::vector<int>> words_; // terminal symbol id per word string? see cpp
  int start_ = 0;
};

// Exact conditional action probabilities under a PCFG for the in-order
// transition system: p(action | prefix) is the ratio of prefix-tree masses,
// computed from left-corner chain masses and rule prefix sums. Drives the
// word-synchronous decoder when an exact reference is needed.
class PcfgActionScorer {
 public:
  explicit PcfgActionScorer(const Pcfg& g, const ActionCaps& caps = {});

  struct State {
    ParseState core;
    double log_inside = 0.0;
    double log_t_top = 0.0;  // top-region mass factor
    std::shared_ptr<const struct CouplingNode> chain;
    double log_w = 0.0;  // cumulative log prefix mass = logprob of the prefix
  };

  State initial() const;

  // Log conditional probability of the action and the successor state;
  // false when the action has zero mass or is structurally illegal.
  bool step(const State& s, const Action& a, double* logp, State* next) const;

  // log p(sequence ends | state): finite only at a completed start-rooted item.
  double end_logprob(const State& s) const;

  const std::vector<std::string>& open_labels() const { return open_labels_; }
  const ActionCaps& caps() const { return caps_; }
  const Pcfg& grammar() const { return grammar_; }
  const std::string& root_label() const { return root_label_; }

 private:
  double rule_prefix_mass(int lhs_index, const std::vector<std::string>& prefix) const;
  double attach_mass(const std::string& from_label, int marker_index,
                     const std::vector<std::string>& committed) const;
  int label_index(const std::string& name) const;  // -1 if unknown
  double rule_logprob(const std::string& lhs,
                      const std::vector<std::string>& children) const;

  Pcfg grammar_;
  ActionCaps caps_;
  std::string root_label_;
  std::vector<std::string> open_labels_;
  // Left-corner chain mass between nonterminal labels: lc_[from][to].
  std::vector<std::vector<double>> lc_;
  // Per terminal word: sum over lexical/first-symbol rules of p * lc row.
  std::vector<std::vector<double>> word_lc_;
  std::vector<int> word_index_of_symbol_;
  std::vector<int> label_index_of_symbol_;
};

struct CouplingNode {
  double log_c;
  std::shared_ptr<const CouplingNode> below;
};

}  // namespace coordlab

#endif

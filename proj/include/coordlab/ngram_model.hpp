#ifndef COORDLAB_NGRAM_MODEL_HPP
#define COORDLAB_NGRAM_MODEL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "coordlab/grammar.hpp"
#include "coordlab/oracle.hpp"

namespace coordlab {

// Dense ids over the action inventory. 0..2 are reserved for REDUCE, the
// sequence-end symbol, and the begin-of-sequence padding symbol; GEN and
// OPEN actions are interned above them.
class ActionVocab {
 public:
  static constexpr std::int32_t kReduce = 0;
  static constexpr std::int32_t kEnd = 1;
  static constexpr std::int32_t kBos = 2;

  ActionVocab();

  std::int32_t intern_gen(const std::string& word);
  std::int32_t intern_open(const std::string& label);
  std::int32_t find_gen(const std::string& word) const;
  std::int32_t find_open(const std::string& label) const;
  std::int32_t id_of(const Action& a) const;  // -1 if unknown

  bool is_gen(std::int32_t id) const;
  bool is_open(std::int32_t id) const;
  const std::string& arg(std::int32_t id) const;
  Action action(std::int32_t id) const;

  std::size_t size() const { return names_.size(); }
  // Predictable actions: everything except the padding symbol.
  std::size_t event_count() const { return names_.size() - 1; }
  const std::vector<std::int32_t>& open_ids() const { return open_ids_; }
  const std::vector<std::int32_t>& gen_ids() const { return gen_ids_; }

  static ActionVocab from_grammar(const Pcfg& g);

 private:
  std::vector<std::string> names_;  // "R", "E", "B", then "G:w" / "O:x"
  std::unordered_map<std::string, std::int32_t> index_;
  std::vector<std::int32_t> open_ids_;
  std::vector<std::int32_t> gen_ids_;
};

struct NgramConfig {
  int order = 5;  // condition on order-1 previous actions
};

// Which action groups are admissible in the current parser state; the model
// renormalizes its smoothed distribution over exactly these.
struct GroupLegal {
  bool gen = false;
  bool open = false;
  bool reduce = false;
  bool end = false;
};

// Witten-Bell interpolated action n-gram model. Immutable after training.
class ActionNgramModel {
 public:
  const ActionVocab& vocab() const { return vocab_; }
  int order() const { return order_; }

  // Unnormalized smoothed probability over the whole action universe.
  double raw_prob(const std::vector<std::int32_t>& context, std::int32_t action) const;

  // Log probability renormalized over the legal groups. The context holds
  // the previous actions, most recent last; shorter contexts are implicitly
  // BOS-padded.
  double logprob(const std::vector<std::int32_t>& context, std::int32_t action,
                 const GroupLegal& legal) const;

  // String-level convenience mirroring the per-operation contract.
  double action_logprob(const std::vector<Action>& history, const Action& a,
                        const GroupLegal& legal) const;

  // Perplexity per event (actions plus sequence end) on held-out sequences.
  double perplexity(const std::vector<ActionSequence>& data) const;

  std::string to_string() const;
  static ActionNgramModel from_string(const std::string& text);
  void save(const std::string& path) const;
  static ActionNgramModel load(const std::string& path);

  friend ActionNgramModel train_action_model(const std::vector<ActionSequence>&,
                                             const NgramConfig&, const ActionVocab&);

 private:
  struct Cell {
    std::uint64_t total = 0;
    double gen_mass = 0;   // counts falling on GEN actions
    double open_mass = 0;  // counts falling on OPEN actions
    std::unordered_map<std::int32_t, std::uint32_t> counts;
  };

  // Group-aware interpolated sums: probability of one action and the summed
  // probability of each group under the order-j distribution.
  double prob_rec(const std::int32_t* ctx, int len, std::int32_t action) const;
  void group_sums(const std::int32_t* ctx, int len, double* gen_sum,
                  double* open_sum, double* reduce_p, double* end_p) const;

  const Cell* find_cell(const std::int32_t* ctx, int len) const;

  ActionVocab vocab_;
  int order_ = 5;
  // counts_[j] maps a length-j context (byte-encoded ids) to its cell.
  std::vector<std::unordered_map<std::string, Cell>> counts_;
  std::uint64_t events_ = 0;
};

// Counts all action n-grams up to the configured order (sequences padded
// with BOS, terminated with the end symbol). The vocabulary seeds the action
// universe and is extended by anything observed. Throws on empty input.
ActionNgramModel train_action_model(const std::vector<ActionSequence>& data,
                                    const NgramConfig& config = {},
                                    const ActionVocab& base_vocab = {});

}  // namespace coordlab

#endif

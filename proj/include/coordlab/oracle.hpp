#ifndef COORDLAB_ORACLE_HPP
#define COORDLAB_ORACLE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "coordlab/tree.hpp"

namespace coordlab {

enum class ActionKind { Open, Gen, Reduce };

struct Action {
  ActionKind kind;
  std::string arg;  // nonterminal label for Open, word form for Gen

  static Action open(std::string label) { return {ActionKind::Open, std::move(label)}; }
  static Action gen(std::string word) { return {ActionKind::Gen, std::move(word)}; }
  static Action reduce() { return {ActionKind::Reduce, {}}; }

  bool operator==(const Action& o) const = default;
};

using ActionSequence = std::vector<Action>;

// In-order (left-corner) linearization: node X with children c1..cn emits
// c1, OPEN(X), c2..cn, REDUCE; a leaf emits GEN(word).
ActionSequence tree_to_actions(const Tree& t);

// Stack-machine inverse; throws Error("...at action <i>") on malformed input.
Tree actions_to_tree(const ActionSequence& a);

std::string actions_to_string(const ActionSequence& a);
ActionSequence actions_from_string(const std::string& line);

// One sequence per line.
void save_oracle_file(const std::vector<ActionSequence>& seqs, const std::string& path);
std::vector<ActionSequence> load_oracle_file(const std::string& path);

struct ActionCaps {
  int max_open = 64;
  // Structural actions allowed without an intervening GEN. The grammar's
  // sentence-final completions routinely run past small values, so the
  // default stays clear of gold sequences.
  int max_consecutive_structural = 128;
};

// Label-level legality summary for a partial parse state.
struct LegalActions {
  bool gen = false;     // GEN(w) for every vocabulary word
  bool open = false;    // OPEN(X) for every nonterminal label
  bool reduce = false;
  bool finish = false;  // the sequence may end here
};

// Persistent parse stack: completed items and open-nonterminal markers. A
// marker holds its left corner and accumulates children until REDUCE.
struct StackEntry {
  enum class Kind { Item, Marker };
  Kind kind;
  std::string label;        // item root label or word; marker nonterminal
  std::string left_corner;  // markers remember their popped left corner
  std::shared_ptr<const StackEntry> below;
};

class ParseState {
 public:
  ParseState() = default;

  bool empty() const { return !top_; }
  const StackEntry* top() const { return top_.get(); }
  int open_count() const { return open_count_; }
  int consecutive_structural() const { return consec_structural_; }
  int words_generated() const { return words_; }

  // Stack is a single completed item with the given label.
  bool at_completed_root(const std::string& root_label) const;

  // words_remaining < 0 means unconstrained generation.
  LegalActions legal(const ActionCaps& caps, int words_remaining = -1,
                     const std::string& root_label = "S") const;

  // Applies a structurally legal action; returns false if illegal. The label
  // check for Open/Gen arguments is the caller's concern.
  bool apply(const Action& a, const ActionCaps& caps, ParseState* out) const;

  // Labels of the committed children of the topmost marker (left corner plus
  // pending items), and the top item if one sits above the marker.
  // Used by grammar-aware scorers.
  struct TopView {
    bool has_marker = false;
    std::string marker_label;
    std::vector<std::string> committed;  // children so far, in order
    bool has_top_item = false;
    std::string top_item_label;
    const StackEntry* marker = nullptr;
  };
  TopView top_view() const;

 private:
  std::shared_ptr<const StackEntry> top_;
  int open_count_ = 0;
  int consec_structural_ = 0;
  int words_ = 0;
};

// Convenience wrapper matching the per-operation contract: the set of actions
// that keep the partial sequence completable under the caps.
LegalActions legal_actions(const ParseState& state, const ActionCaps& caps = {},
                           int words_remaining = -1,
                           const std::string& root_label = "S");

// Replays a full sequence, checking legality at every step.
bool sequence_is_legal(const ActionSequence& seq, const ActionCaps& caps = {},
                       const std::string& root_label = "S");

}  // namespace coordlab

#endif

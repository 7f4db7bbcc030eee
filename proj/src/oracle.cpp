#include "coordlab/oracle.hpp"

#include <sstream>

#include "coordlab/error.hpp"
#include "coordlab/util.hpp"

namespace coordlab {

namespace {

void linearize(const Tree& t, ActionSequence* out) {
  if (t.leaf) {
    out->push_back(Action::gen(t.label));
    return;
  }
  if (t.children.empty()) throw Error("tree_to_actions: internal node without children");
  linearize(t.children[0], out);
  out->push_back(Action::open(t.label));
  for (std::size_t i = 1; i < t.children.size(); ++i) linearize(t.children[i], out);
  out->push_back(Action::reduce());
}

}  // namespace

ActionSequence tree_to_actions(const Tree& t) {
  ActionSequence out;
  linearize(t, &out);
  return out;
}

Tree actions_to_tree(const ActionSequence& a) {
  struct Frame {
    bool marker;
    Tree tree;               // completed item
    std::string label;       // marker label
    std::vector<Tree> kids;  // marker children (left corner first)
  };
  std::vector<Frame> stack;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Action& act = a[i];
    switch (act.kind) {
      case ActionKind::Gen: {
        Frame f;
        f.marker = false;
        f.tree = Tree::word(act.arg);
        stack.push_back(std::move(f));
        break;
      }
      case ActionKind::Open: {
        if (stack.empty() || stack.back().marker)
          throw Error("actions_to_tree: OPEN with no left corner at action " +
                      std::to_string(i));
        Frame f;
        f.marker = true;
        f.label = act.arg;
        f.kids.push_back(std::move(stack.back().tree));
        stack.pop_back();
        stack.push_back(std::move(f));
        break;
      }
      case ActionKind::Reduce: {
        std::vector<Tree> tail;
        while (!stack.empty() && !stack.back().marker) {
          tail.push_back(std::move(stack.back().tree));
          stack.pop_back();
        }
        if (stack.empty())
          throw Error("actions_to_tree: REDUCE with no open nonterminal at action " +
                      std::to_string(i));
        Frame marker = std::move(stack.back());
        stack.pop_back();
        for (auto it = tail.rbegin(); it != tail.rend(); ++it)
          marker.kids.push_back(std::move(*it));
        Frame f;
        f.marker = false;
        f.tree = Tree::node(marker.label, std::move(marker.kids));
        stack.push_back(std::move(f));
        break;
      }
    }
  }
  if (a.empty()) throw Error("actions_to_tree: empty sequence");
  if (stack.size() != 1 || stack.back().marker)
    throw Error("actions_to_tree: sequence leaves " + std::to_string(stack.size()) +
                " items on the stack");
  return stack.back().tree;
}

std::string actions_to_string(const ActionSequence& a) {
  std::vector<std::string> toks;
  toks.reserve(a.size());
  for (const Action& act : a) {
    switch (act.kind) {
      case ActionKind::Open: toks.push_back("OPEN:" + act.arg); break;
      case ActionKind::Gen: toks.push_back("GEN:" + act.arg); break;
      case ActionKind::Reduce: toks.push_back("REDUCE"); break;
    }
  }
  return join(toks, " ");
}

ActionSequence actions_from_string(const std::string& line) {
  ActionSequence out;
  for (const std::string& tok : split_ws(line)) {
    if (tok == "REDUCE") {
      out.push_back(Action::reduce());
    } else if (tok.rfind("OPEN:", 0) == 0) {
      out.push_back(Action::open(tok.substr(5)));
    } else if (tok.rfind("GEN:", 0) == 0) {
      out.push_back(Action::gen(tok.substr(4)));
    } else {
      throw ConfigError("bad oracle token: " + tok);
    }
  }
  return out;
}

void save_oracle_file(const std::vector<ActionSequence>& seqs, const std::string& path) {
  std::string out;
  for (const ActionSequence& s : seqs) {
    out += actions_to_string(s);
    out += '\n';
  }
  write_file(path, out);
}

std::vector<ActionSequence> load_oracle_file(const std::string& path) {
  std::vector<ActionSequence> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(actions_from_string(line));
  }
  return out;
}

bool ParseState::at_completed_root(const std::string& root_label) const {
  return top_ && !top_->below && top_->kind == StackEntry::Kind::Item &&
         top_->label == root_label;
}

LegalActions ParseState::legal(const ActionCaps& caps, int words_remaining,
                               const std::string& root_label) const {
  LegalActions l;
  bool structural_ok = consec_structural_ < caps.max_consecutive_structural;

  if (words_remaining == 0 && at_completed_root(root_label)) {
    l.finish = true;
    return l;
  }
  // GEN strands a markerless completed item, so it needs an empty stack or at
  // least one open nonterminal.
  l.gen = (words_remaining != 0) && (empty() || open_count_ > 0);
  l.open = structural_ok && open_count_ < caps.max_open && top_ &&
           top_->kind == StackEntry::Kind::Item;
  l.reduce = structural_ok && open_count_ > 0;
  l.finish = words_remaining <= 0 && at_completed_root(root_label);
  return l;
}

bool ParseState::apply(const Action& a, const ActionCaps& caps, ParseState* out) const {
  bool structural_ok = consec_structural_ < caps.max_consecutive_structural;
  ParseState next = *this;
  switch (a.kind) {
    case ActionKind::Gen: {
      if (!(empty() || open_count_ > 0)) return false;
      auto e = std::make_shared<StackEntry>();
      e->kind = StackEntry::Kind::Item;
      e->label = a.arg;
      e->below = top_;
      next.top_ = std::move(e);
      next.consec_structural_ = 0;
      next.words_ += 1;
      break;
    }
    case ActionKind::Open: {
      if (!structural_ok || open_count_ >= caps.max_open || !top_ ||
          top_->kind != StackEntry::Kind::Item)
        return false;
      auto e = std::make_shared<StackEntry>();
      e->kind = StackEntry::Kind::Marker;
      e->label = a.arg;
      e->left_corner = top_->label;
      e->below = top_->below;  // pops the left corner into the marker
      next.top_ = std::move(e);
      next.open_count_ += 1;
      next.consec_structural_ += 1;
      break;
    }
    case ActionKind::Reduce: {
      if (!structural_ok || open_count_ <= 0) return false;
      const StackEntry* walk = top_.get();
      std::shared_ptr<const StackEntry> below;
      std::string label;
      while (walk) {
        if (walk->kind == StackEntry::Kind::Marker) {
          below = walk->below;
          label = walk->label;
          break;
        }
        walk = walk->below.get();
      }
      auto e = std::make_shared<StackEntry>();
      e->kind = StackEntry::Kind::Item;
      e->label = label;
      e->below = below;
      next.top_ = std::move(e);
      next.open_count_ -= 1;
      next.consec_structural_ += 1;
      break;
    }
  }
  *out = std::move(next);
  return true;
}

ParseState::TopView ParseState::top_view() const {
  TopView v;
  const StackEntry* walk = top_.get();
  std::vector<const StackEntry*> items;
  while (walk && walk->kind == StackEntry::Kind::Item) {
    items.push_back(walk);
    walk = walk->below.get();
  }
  if (walk) {
    v.has_marker = true;
    v.marker_label = walk->label;
    v.marker = walk;
    v.committed.push_back(walk->left_corner);
  }
  if (!items.empty()) {
    v.has_top_item = true;
    v.top_item_label = items.front()->label;
  }
  // Committed children: the marker's left corner, then pending items frozen
  // below the still-growable top item, in left-to-right order.
  for (std::size_t i = items.size(); i > 1; --i)
    v.committed.push_back(items[i - 1]->label);
  return v;
}

LegalActions legal_actions(const ParseState& state, const ActionCaps& caps,
                           int words_remaining, const std::string& root_label) {
  return state.legal(caps, words_remaining, root_label);
}

bool sequence_is_legal(const ActionSequence& seq, const ActionCaps& caps,
                       const std::string& root_label) {
  ParseState st;
  int remaining = 0;
  for (const Action& a : seq)
    if (a.kind == ActionKind::Gen) ++remaining;
  for (const Action& a : seq) {
    LegalActions l = st.legal(caps, remaining, root_label);
    bool ok = (a.kind == ActionKind::Gen && l.gen) ||
              (a.kind == ActionKind::Open && l.open) ||
              (a.kind == ActionKind::Reduce && l.reduce);
    if (!ok) return false;
    ParseState next;
    if (!st.apply(a, caps, &next)) return false;
    st = next;
    if (a.kind == ActionKind::Gen) --remaining;
  }
  return st.at_completed_root(root_label) ||
         (st.top() && !st.top()->below && st.open_count() == 0);
}

}  // namespace coordlab

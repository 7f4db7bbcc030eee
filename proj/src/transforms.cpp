#include "coordlab/transforms.hpp"

#include <algorithm>

namespace coordlab {

bool is_coordination_node(const Tree& t) {
  return !t.leaf && t.children.size() == 3 && !t.children[0].leaf &&
         !t.children[1].leaf && !t.children[2].leaf &&
         t.children[0].label == t.label && t.children[2].label == t.label &&
         t.children[1].label == "CC";
}

namespace {

// Preorder search for the first coordination node not labeled sentence_label.
// Fills path with child indices from the root; returns true when found.
bool find_nonsentential_coordination(const Tree& t, const std::string& s_label,
                                     std::vector<int>* path) {
  if (t.leaf) return false;
  if (is_coordination_node(t) && t.label != s_label) return true;
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    path->push_back(static_cast<int>(i));
    if (find_nonsentential_coordination(t.children[i], s_label, path)) return true;
    path->pop_back();
  }
  return false;
}

Tree* node_at(Tree& t, const std::vector<int>& path, std::size_t depth) {
  Tree* cur = &t;
  for (std::size_t i = 0; i < depth; ++i) cur = &cur->children[path[i]];
  return cur;
}

// Copy of the subtree rooted at `root` with the node at relative path
// replaced by `replacement`.
Tree replace_at(const Tree& root, const std::vector<int>& path, std::size_t from,
                std::size_t to, const Tree& replacement) {
  if (from == to) return replacement;
  Tree out = root;
  Tree* cur = &out;
  for (std::size_t i = from; i + 1 < to; ++i) cur = &cur->children[path[i]];
  cur->children[path[to - 1]] = replacement;
  return out;
}

}  // namespace

Tree expand_coordination(const Tree& t, const std::string& sentence_label) {
  Tree cur = t;
  for (int guard = 0; ; ++guard) {
    if (guard > 1000000) throw Error("expand_coordination: did not reach a fixed point");
    std::vector<int> path;
    if (!find_nonsentential_coordination(cur, sentence_label, &path)) return cur;

    // Nearest dominating node labeled sentence_label: the deepest node
    // strictly above the coordination node (depth path.size()) carrying it.
    int s_depth = -1;
    const Tree* walk = &cur;
    if (walk->label == sentence_label) s_depth = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      walk = &walk->children[path[i]];
      if (walk->label == sentence_label) s_depth = static_cast<int>(i + 1);
    }
    if (s_depth < 0)
      throw Error("expand_coordination: coordination node with no dominating " +
                  sentence_label);

    Tree* s_star = node_at(cur, path, static_cast<std::size_t>(s_depth));
    const Tree* coord = node_at(cur, path, path.size());
    Tree left = replace_at(*s_star, path, static_cast<std::size_t>(s_depth),
                           path.size(), coord->children[0]);
    Tree right = replace_at(*s_star, path, static_cast<std::size_t>(s_depth),
                            path.size(), coord->children[2]);
    Tree cc = coord->children[1];
    *s_star = Tree::node(sentence_label, {std::move(left), std::move(cc), std::move(right)});
  }
}

const std::set<std::string>& default_coordinable_labels() {
  static const std::set<std::string> labels{"NP", "Adj", "IVerb", "TVerb"};
  return labels;
}

namespace {

bool find_sentential_coordination(const Tree& t, const std::string& s_label,
                                  std::vector<int>* path) {
  if (t.leaf) return false;
  if (is_coordination_node(t) && t.label == s_label) return true;
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    path->push_back(static_cast<int>(i));
    if (find_sentential_coordination(t.children[i], s_label, path)) return true;
    path->pop_back();
  }
  return false;
}

}  // namespace

namespace {

struct LocusCandidate {
  std::vector<int> path;  // relative to a conjunct root
  const Tree* x1;
  const Tree* x2;
};

// Walks the unique-difference path between the conjuncts, collecting the
// equal-label internal pairs that could host the collapsed coordination.
std::vector<LocusCandidate> locus_candidates(const Tree& s1, const Tree& s2) {
  std::vector<LocusCandidate> candidates;
  const Tree* a = &s1;
  const Tree* b = &s2;
  std::vector<int> path;
  while (true) {
    if (a->leaf || b->leaf) break;
    if (a->children.size() != b->children.size()) break;
    int diff = -1;
    bool multiple = false;
    for (std::size_t i = 0; i < a->children.size(); ++i) {
      if (a->children[i] != b->children[i]) {
        if (diff >= 0) multiple = true;
        diff = static_cast<int>(i);
      }
    }
    if (diff < 0 || multiple) break;
    const Tree* ca = &a->children[diff];
    const Tree* cb = &b->children[diff];
    if (ca->leaf || cb->leaf) break;
    if (ca->label != cb->label) break;
    path.push_back(diff);
    candidates.push_back({path, ca, cb});
    a = ca;
    b = cb;
  }
  return candidates;
}

}  // namespace

Tree conjunction_reduce(const Tree& t, const std::set<std::string>& coordinable,
                        const std::string& sentence_label) {
  std::vector<int> coord_path;
  if (!find_sentential_coordination(t, sentence_label, &coord_path))
    throw NotReducible("no sentence-level coordination");
  Tree cur = t;
  Tree* coord = node_at(cur, coord_path, coord_path.size());
  const Tree& s1 = coord->children[0];
  const Tree& s2 = coord->children[2];
  Tree cc = coord->children[1];
  if (s1 == s2) throw NotReducible("conjuncts are identical");

  std::vector<LocusCandidate> candidates = locus_candidates(s1, s2);
  if (candidates.empty())
    throw NotReducible(
        "conjuncts differ in more than one constituent or in constituents of "
        "unequal category");

  const LocusCandidate* pick = nullptr;
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    if (coordinable.count(it->x1->label)) {
      pick = &*it;
      break;
    }
  }
  if (!pick) pick = &candidates.back();

  Tree inner = Tree::node(pick->x1->label, {*pick->x1, std::move(cc), *pick->x2});
  Tree reduced = replace_at(s1, pick->path, 0, pick->path.size(), inner);
  *coord = std::move(reduced);
  return cur;
}

int reduction_locus_count(const Tree& t, const std::set<std::string>& coordinable,
                          const std::string& sentence_label) {
  std::vector<int> coord_path;
  if (!find_sentential_coordination(t, sentence_label, &coord_path)) return 0;
  const Tree* coord = &t;
  for (int step : coord_path) coord = &coord->children[step];
  int count = 0;
  for (const LocusCandidate& c :
       locus_candidates(coord->children[0], coord->children[2]))
    if (coordinable.count(c.x1->label)) ++count;
  return count;
}

namespace {

struct LeafRef {
  const Tree* node;
  std::vector<int> path;  // from the scope root
};

void collect_leaves(const Tree& t, std::vector<int>* path, std::vector<LeafRef>* out) {
  if (t.leaf) {
    out->push_back({&t, *path});
    return;
  }
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    path->push_back(static_cast<int>(i));
    collect_leaves(t.children[i], path, out);
    path->pop_back();
  }
}

void mark_scope(const Tree& scope, const std::string& s_label,
                const std::vector<int>& scope_path, const Tree& root,
                std::vector<bool>* deleted);

// Recursion that finds maximal sentence-coordination scopes.
void find_scopes(const Tree& t, const std::string& s_label, std::vector<int>* path,
                 const Tree& root, std::vector<bool>* deleted) {
  if (t.leaf) return;
  if (is_coordination_node(t) && t.label == s_label) {
    mark_scope(t, s_label, *path, root, deleted);
    return;  // nested coordinations belong to this scope
  }
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    path->push_back(static_cast<int>(i));
    find_scopes(t.children[i], s_label, path, root, deleted);
    path->pop_back();
  }
}

// Global leaf index of a node given its path from the tree root.
std::size_t leaf_index_of(const Tree& root, const std::vector<int>& path) {
  std::size_t index = 0;
  const Tree* cur = &root;
  for (int step : path) {
    for (int i = 0; i < step; ++i) {
      std::vector<std::string> y = tree_yield(cur->children[i]);
      index += y.size();
    }
    cur = &cur->children[step];
  }
  return index;
}

void mark_scope(const Tree& scope, const std::string& s_label,
                const std::vector<int>& scope_path, const Tree& root,
                std::vector<bool>* deleted) {
  std::vector<LeafRef> leaves;
  std::vector<int> p;
  collect_leaves(scope, &p, &leaves);
  std::size_t base = leaf_index_of(root, scope_path);

  std::set<std::string> seen;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const LeafRef& leaf = leaves[k];
    // Exempt iff inside the first conjunct of every covering coordination;
    // CC tokens are those under a CC node.
    bool exempt = true;
    bool is_cc = false;
    const Tree* cur = &scope;
    for (int step : leaf.path) {
      if (is_coordination_node(*cur) && cur->label == s_label && step != 0)
        exempt = false;
      if (cur->label == "CC") is_cc = true;
      cur = &cur->children[step];
    }
    const std::string& form = leaf.node->label;
    if (!is_cc && !exempt && seen.count(form)) {
      (*deleted)[base + k] = true;
    } else {
      seen.insert(form);
    }
  }
}

}  // namespace

Tree linear_reduce(const Tree& t, const std::string& sentence_label) {
  std::size_t total = tree_yield(t).size();
  std::vector<bool> deleted(total, false);
  std::vector<int> path;
  find_scopes(t, sentence_label, &path, t, &deleted);
  bool any = false;
  for (bool d : deleted) any = any || d;
  if (!any) return t;
  return prune_empty(t, deleted);
}

namespace {

bool prune_rec(const Tree& t, const std::vector<bool>& deleted, std::size_t* cursor,
               Tree* out) {
  if (t.leaf) {
    bool keep = !deleted[*cursor];
    ++(*cursor);
    if (keep) *out = t;
    return keep;
  }
  Tree node;
  node.label = t.label;
  for (const Tree& c : t.children) {
    Tree kept;
    if (prune_rec(c, deleted, cursor, &kept)) node.children.push_back(std::move(kept));
  }
  if (node.children.empty()) return false;
  *out = std::move(node);
  return true;
}

}  // namespace

Tree prune_empty(const Tree& t, const std::vector<bool>& deleted) {
  std::size_t total = tree_yield(t).size();
  if (deleted.size() != total)
    throw Error("prune_empty: mask size " + std::to_string(deleted.size()) +
                " does not match leaf count " + std::to_string(total));
  std::size_t cursor = 0;
  Tree out;
  if (!prune_rec(t, deleted, &cursor, &out))
    throw Error("empty sentence after reduction");
  return out;
}

Corpus regime_corpus(const Corpus& c, Regime regime) {
  Corpus out;
  out.language = c.language;
  out.language.regime = regime;
  out.entries.reserve(c.entries.size());
  for (const CorpusEntry& e : c.entries) {
    CorpusEntry n;
    n.split = e.split;
    switch (regime) {
      case Regime::StructureReduction:
        n.tree = e.tree;
        break;
      case Regime::NoReduction:
        n.tree = expand_coordination(e.tree);
        break;
      case Regime::LinearReduction:
        n.tree = linear_reduce(expand_coordination(e.tree));
        break;
    }
    n.sentence = tree_yield(n.tree);
    out.entries.push_back(std::move(n));
  }
  return out;
}

}  // namespace coordlab

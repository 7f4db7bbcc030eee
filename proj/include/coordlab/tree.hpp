#ifndef COORDLAB_TREE_HPP
#define COORDLAB_TREE_HPP

#include <string>
#include <vector>

namespace coordlab {

// Labeled derivation tree. A leaf carries a terminal word form; an internal
// node carries a category label and an ordered child list. Preterminals are
// ordinary internal nodes whose single child is a leaf.
struct Tree {
  std::string label;
  bool leaf = false;
  std::vector<Tree> children;

  Tree() = default;
  static Tree word(std::string form) {
    Tree t;
    t.label = std::move(form);
    t.leaf = true;
    return t;
  }
  static Tree node(std::string label, std::vector<Tree> children) {
    Tree t;
    t.label = std::move(label);
    t.children = std::move(children);
    return t;
  }

  bool operator==(const Tree& o) const {
    return leaf == o.leaf && label == o.label && children == o.children;
  }
  bool operator!=(const Tree& o) const { return !(*this == o); }
};

// Left-to-right terminal word forms.
std::vector<std::string> tree_yield(const Tree& t);

// Number of internal (non-leaf) nodes.
std::size_t internal_node_count(const Tree& t);

// Maximum root-to-leaf node count.
std::size_t tree_depth(const Tree& t);

// Bracketed s-expression, e.g. (S (NP (Pronoun bo)) (VP (IVerb wandify))).
// Labels and word forms must not contain whitespace or parentheses.
std::string tree_to_sexpr(const Tree& t);

// Parses a bracketed tree; throws std::runtime_error on malformed input.
Tree tree_from_sexpr(const std::string& s);

}  // namespace coordlab

#endif

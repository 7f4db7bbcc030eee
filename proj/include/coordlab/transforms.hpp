#ifndef COORDLAB_TRANSFORMS_HPP
#define COORDLAB_TRANSFORMS_HPP

#include <set>
#include <string>
#include <vector>

#include "coordlab/error.hpp"
#include "coordlab/sampler.hpp"
#include "coordlab/tree.hpp"

namespace coordlab {

struct NotReducible : Error {
  explicit NotReducible(const std::string& msg) : Error(msg) {}
};

// A coordination node is X -> X CC X: three children, outer labels equal to
// the node label, middle child labeled CC.
bool is_coordination_node(const Tree& t);

// Lifts every non-sentential coordination to sentence level: repeatedly
// finds the first (preorder) coordination node X != S, replaces its nearest
// dominating S node S* by S' CC S'' where S' and S'' are copies of S* with
// the coordination node replaced by the respective conjunct. The result has
// no coordination node other than S -> S CC S.
Tree expand_coordination(const Tree& t, const std::string& sentence_label = "S");

// The categories whose coordination the base grammar generates; used to pick
// the reduction site when several nested candidates exist.
const std::set<std::string>& default_coordinable_labels();

// Inverse of expand_coordination on single-coordination trees: finds the
// sentence-level coordination, locates the unique constituent pair where the
// two conjuncts differ, and collapses to Y + (X1 CC X2) + Z. When several
// nested constituent pairs could host the coordination, the deepest pair
// with a coordinable label wins. Throws NotReducible when the conjuncts are
// identical, differ in more than one constituent, or differ in constituents
// of unequal category.
Tree conjunction_reduce(const Tree& t,
                        const std::set<std::string>& coordinable = default_coordinable_labels(),
                        const std::string& sentence_label = "S");

// Number of coordinable constituent pairs that could host the reduction of
// the first sentence-level coordination of t. A value above 1 means
// expand_coordination maps several distinct trees to t, so no inverse can
// recover a unique preimage.
int reduction_locus_count(const Tree& t,
                          const std::set<std::string>& coordinable = default_coordinable_labels(),
                          const std::string& sentence_label = "S");

// Deletes, within each maximal sentence-level coordination scope, every
// later occurrence of an already-seen word form. Tokens inside the first
// conjunct of every covering coordination and CC tokens are never deleted.
// Emptied internal nodes are pruned.
Tree linear_reduce(const Tree& t, const std::string& sentence_label = "S");

// Removes the leaves marked deleted (by left-to-right leaf index) and any
// internal node left without surviving leaves. Throws Error if the root
// would become empty.
Tree prune_empty(const Tree& t, const std::vector<bool>& deleted);

// structure-reduction: identity; no-reduction: expand_coordination per
// entry; linear-reduction: linear_reduce after expand_coordination. Split
// labels are preserved so the three regimes stay sentence-aligned.
Corpus regime_corpus(const Corpus& c, Regime regime);

}  // namespace coordlab

#endif

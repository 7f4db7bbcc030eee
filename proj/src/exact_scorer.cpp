#include "coordlab/exact_scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <queue>

#include "coordlab/error.hpp"
#include "coordlab/util.hpp"

namespace coordlab {

namespace {

struct Acc {
  double log_z = kNegInf;
  double tbar = 0.0;
  double count = 0.0;

  void add(double lz, double tb, double cnt, double cap) {
    if (lz <= kNegInf) return;
    if (log_z <= kNegInf) {
      log_z = lz;
      tbar = tb;
      count = std::min(cnt, cap);
      return;
    }
    double merged = logadd(log_z, lz);
    double w_old = std::exp(log_z - merged);
    double w_new = std::exp(lz - merged);
    tbar = w_old * tbar + w_new * tb;
    log_z = merged;
    count = std::min(count + cnt, cap);
  }
};

}  // namespace

ExactPcfgScorer::ExactPcfgScorer(const Pcfg& g) : grammar_(g) {
  // Internal dense indices: non-terminal grammar symbols first, then
  // binarization auxiliaries. Terminals are matched against words directly.
  std::vector<int> nt_index(g.num_symbols(), -1);
  for (SymbolId i = 0; i < static_cast<SymbolId>(g.num_symbols()); ++i) {
    if (g.symbol(i).kind != SymbolKind::Terminal) {
      nt_index[i] = nsym_;
      sym_names_.push_back(g.name(i));
      ++nsym_;
    }
  }
  // Symbol reference: >=0 internal index for non-terminals; terminals are
  // encoded as -(SymbolId+2) so they stay distinguishable.
  auto ref = [&](SymbolId s) {
    return g.symbol(s).kind == SymbolKind::Terminal ? -(s + 2) : nt_index[s];
  };

  for (std::size_t ri = 0; ri < g.rules().size(); ++ri) {
    const Rule& r = g.rules()[ri];
    double lp = std::log(r.prob);
    int lhs = nt_index[r.lhs];
    if (r.rhs.size() == 1) {
      unary_.push_back({lhs, ref(r.rhs[0]), lp});
    } else if (r.rhs.size() == 2) {
      binary_.push_back({lhs, ref(r.rhs[0]), ref(r.rhs[1]), lp});
    } else {
      int prev = lhs;
      double p = lp;
      for (std::size_t k = 0; k + 2 < r.rhs.size(); ++k) {
        int aux = nsym_;
        sym_names_.push_back("@" + std::to_string(ri) + "." + std::to_string(k));
        ++nsym_;
        binary_.push_back({prev, ref(r.rhs[k]), aux, p});
        prev = aux;
        p = 0.0;
      }
      binary_.push_back({prev, ref(r.rhs[r.rhs.size() - 2]),
                         ref(r.rhs[r.rhs.size() - 1]), p});
    }
  }
  start_ = nt_index[g.start()];

  // Topological order over unary rules with non-terminal children.
  std::vector<std::vector<int>> out(nsym_);
  std::vector<int> indeg(nsym_, 0);
  for (const UnaRule& u : unary_) {
    if (u.child >= 0) {
      out[u.child].push_back(u.lhs);
      indeg[u.lhs] += 1;
    }
  }
  std::queue<int> q;
  std::vector<int> order_of(nsym_, -1);
  int next_rank = 0;
  for (int i = 0; i < nsym_; ++i)
    if (indeg[i] == 0) q.push(i);
  while (!q.empty()) {
    int s = q.front();
    q.pop();
    order_of[s] = next_rank++;
    for (int t : out[s])
      if (--indeg[t] == 0) q.push(t);
  }
  if (next_rank != nsym_) throw Error("ExactPcfgScorer: unary rule cycle");
  std::vector<int> idx(unary_.size());
  for (std::size_t i = 0; i < unary_.size(); ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    int ra = unary_[a].child >= 0 ? order_of[unary_[a].child] : -1;
    int rb = unary_[b].child >= 0 ? order_of[unary_[b].child] : -1;
    return ra < rb;
  });
  for (int i : idx) unary_order_.push_back(i);
}

void ExactPcfgScorer::run_chart(const std::vector<std::string>& sentence,
                                std::vector<std::vector<Item>>* chart,
                                bool with_counts, double count_cap) const {
  const int n = static_cast<int>(sentence.size());
  if (n == 0) throw Error("empty sentence");
  std::vector<SymbolId> word_syms(n);
  for (int i = 0; i < n; ++i) {
    SymbolId s = grammar_.find(sentence[i]);
    if (s < 0 || grammar_.symbol(s).kind != SymbolKind::Terminal)
      throw Error("unknown word: " + sentence[i]);
    word_syms[i] = s;
  }

  chart->assign(static_cast<std::size_t>(n) * (n + 1) + n + 1,
                std::vector<Item>());
  auto cell_at = [&](int i, int j) -> std::vector<Item>& {
    return (*chart)[static_cast<std::size_t>(i) * (n + 1) + j];
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j <= n; ++j) cell_at(i, j).assign(nsym_, Item{});

  // A terminal reference matches a width-1 span holding that word.
  auto term_matches = [&](int ref, int i, int j) {
    return j == i + 1 && -(ref + 2) == word_syms[i];
  };

  for (int width = 1; width <= n; ++width) {
    for (int i = 0; i + width <= n; ++i) {
      int j = i + width;
      std::vector<Acc> acc(nsym_);

      for (const BinRule& b : binary_) {
        for (int k = i + 1; k < j; ++k) {
          double lz_l, tb_l, ct_l;
          if (b.left < 0) {
            if (!term_matches(b.left, i, k)) continue;
            lz_l = 0.0; tb_l = 0.0; ct_l = 1.0;
          } else {
            const Item& it = cell_at(i, k)[b.left];
            if (it.log_z <= kNegInf) continue;
            lz_l = it.log_z; tb_l = it.tbar; ct_l = it.count;
          }
          double lz_r, tb_r, ct_r;
          if (b.right < 0) {
            if (!term_matches(b.right, k, j)) continue;
            lz_r = 0.0; tb_r = 0.0; ct_r = 1.0;
          } else {
            const Item& it = cell_at(k, j)[b.right];
            if (it.log_z <= kNegInf) continue;
            lz_r = it.log_z; tb_r = it.tbar; ct_r = it.count;
          }
          acc[b.lhs].add(b.logp + lz_l + lz_r, b.logp + tb_l + tb_r,
                         with_counts ? ct_l * ct_r : 0.0, count_cap);
        }
      }

      // Unary rules in topological order; parents see same-cell children.
      for (int ui : unary_order_) {
        const UnaRule& u = unary_[ui];
        double lz_c, tb_c, ct_c;
        if (u.child < 0) {
          if (!term_matches(u.child, i, j)) continue;
          lz_c = 0.0; tb_c = 0.0; ct_c = 1.0;
        } else {
          const Acc& a = acc[u.child];
          if (a.log_z <= kNegInf) continue;
          lz_c = a.log_z; tb_c = a.tbar; ct_c = a.count;
        }
        acc[u.lhs].add(u.logp + lz_c, u.logp + tb_c, with_counts ? ct_c : 0.0,
                       count_cap);
      }

      std::vector<Item>& cell = cell_at(i, j);
      for (int s = 0; s < nsym_; ++s) {
        cell[s].log_z = acc[s].log_z;
        cell[s].tbar = acc[s].tbar;
        cell[s].count = acc[s].count;
      }
    }
  }
}

double ExactPcfgScorer::inside_logprob(const std::vector<std::string>& sentence) const {
  std::vector<std::vector<Item>> chart;
  run_chart(sentence, &chart, false, 0.0);
  const int n = static_cast<int>(sentence.size());
  return chart[n][start_].log_z;
}

double ExactPcfgScorer::forest_entropy(const std::vector<std::string>& sentence) const {
  std::vector<std::vector<Item>> chart;
  run_chart(sentence, &chart, false, 0.0);
  const int n = static_cast<int>(sentence.size());
  const Item& root = chart[n][start_];
  if (root.log_z <= kNegInf) throw Error("forest_entropy: unparseable sentence");
  return root.log_z - root.tbar;
}

double ExactPcfgScorer::parse_count(const std::vector<std::string>& sentence,
                                    double cap) const {
  std::vector<std::vector<Item>> chart;
  run_chart(sentence, &chart, true, cap);
  const int n = static_cast<int>(sentence.size());
  const Item& root = chart[n][start_];
  return root.log_z <= kNegInf ? 0.0 : root.count;
}

Tree ExactPcfgScorer::binarize_tree(const Tree& t) const {
  if (t.leaf) return t;
  Tree out;
  out.label = t.label;
  if (t.children.size() <= 2) {
    for (const Tree& c : t.children) out.children.push_back(binarize_tree(c));
    return out;
  }
  out.children.push_back(binarize_tree(t.children[0]));
  Tree* hang = &out;
  for (std::size_t k = 1; k + 1 < t.children.size(); ++k) {
    Tree aux;
    aux.label = "@" + t.label + "." + std::to_string(k);
    aux.children.push_back(binarize_tree(t.children[k]));
    hang->children.push_back(std::move(aux));
    hang = &hang->children.back();
  }
  hang->children.push_back(binarize_tree(t.children.back()));
  return out;
}

Tree ExactPcfgScorer::debinarize_tree(const Tree& t) {
  if (t.leaf) return t;
  Tree out;
  out.label = t.label;
  std::vector<const Tree*> queue;
  for (const Tree& c : t.children) queue.push_back(&c);
  std::size_t cursor = 0;
  while (cursor < queue.size()) {
    const Tree* node = queue[cursor++];
    if (!node->leaf && !node->label.empty() && node->label[0] == '@') {
      std::vector<const Tree*> spliced;
      for (const Tree& c : node->children) spliced.push_back(&c);
      queue.insert(queue.begin() + cursor, spliced.begin(), spliced.end());
    } else {
      out.children.push_back(debinarize_tree(*node));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PcfgActionScorer

int PcfgActionScorer::label_index(const std::string& name) const {
  SymbolId s = grammar_.find(name);
  if (s < 0) return -1;
  return label_index_of_symbol_[s];
}

PcfgActionScorer::PcfgActionScorer(const Pcfg& g, const ActionCaps& caps)
    : grammar_(g), caps_(caps) {
  root_label_ = g.name(g.start());
  label_index_of_symbol_.assign(g.num_symbols(), -1);
  word_index_of_symbol_.assign(g.num_symbols(), -1);
  int nlabels = 0, nwords = 0;
  for (SymbolId i = 0; i < static_cast<SymbolId>(g.num_symbols()); ++i) {
    if (g.symbol(i).kind == SymbolKind::Terminal) {
      word_index_of_symbol_[i] = nwords++;
    } else {
      label_index_of_symbol_[i] = nlabels++;
      open_labels_.push_back(g.name(i));
    }
  }
  std::sort(open_labels_.begin(), open_labels_.end());

  // First-symbol rule mass a[l][y] = sum of p over rules y -> l ... .
  std::vector<std::vector<double>> a(nlabels, std::vector<double>(nlabels, 0.0));
  for (const Rule& r : g.rules()) {
    int y = label_index_of_symbol_[r.lhs];
    int first = label_index_of_symbol_[r.rhs[0]];
    if (first >= 0) a[first][y] += r.prob;
  }
  // lc = (I - A)^{-1} via Gauss-Jordan.
  std::vector<std::vector<double>> m(nlabels, std::vector<double>(2 * nlabels, 0.0));
  for (int i = 0; i < nlabels; ++i) {
    for (int j = 0; j < nlabels; ++j) m[i][j] = (i == j ? 1.0 : 0.0) - a[i][j];
    m[i][nlabels + i] = 1.0;
  }
  for (int col = 0; col < nlabels; ++col) {
    int piv = col;
    for (int r = col + 1; r < nlabels; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (std::fabs(m[piv][col]) < 1e-12)
      throw Error("PcfgActionScorer: left-corner chain system is singular");
    std::swap(m[piv], m[col]);
    double d = m[col][col];
    for (int c = 0; c < 2 * nlabels; ++c) m[col][c] /= d;
    for (int r = 0; r < nlabels; ++r) {
      if (r == col) continue;
      double f = m[r][col];
      if (f == 0.0) continue;
      for (int c = 0; c < 2 * nlabels; ++c) m[r][c] -= f * m[col][c];
    }
  }
  lc_.assign(nlabels, std::vector<double>(nlabels, 0.0));
  for (int i = 0; i < nlabels; ++i)
    for (int j = 0; j < nlabels; ++j) lc_[i][j] = m[i][nlabels + j];

  // Word rows: chain mass from a terminal through the rules it begins.
  word_lc_.assign(nwords, std::vector<double>(nlabels, 0.0));
  for (const Rule& r : g.rules()) {
    int w = word_index_of_symbol_[r.rhs[0]];
    if (w < 0) continue;
    int y = label_index_of_symbol_[r.lhs];
    for (int l = 0; l < nlabels; ++l) word_lc_[w][l] += r.prob * lc_[y][l];
  }
}

double PcfgActionScorer::rule_prefix_mass(int lhs_index,
                                          const std::vector<std::string>& prefix) const {
  double mass = 0.0;
  for (const Rule& r : grammar_.rules()) {
    if (label_index_of_symbol_[r.lhs] != lhs_index) continue;
    if (r.rhs.size() < prefix.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < prefix.size() && match; ++i)
      match = grammar_.name(r.rhs[i]) == prefix[i];
    if (match) mass += r.prob;
  }
  return mass;
}

// Mass of wrapping a completed `from`-labeled item upward until it attaches
// as the next child of the open node `marker_index` whose committed prefix
// is `committed`.
double PcfgActionScorer::attach_mass(const std::string& from_label, int marker_index,
                                     const std::vector<std::string>& committed) const {
  SymbolId from = grammar_.find(from_label);
  if (from < 0) return 0.0;
  bool from_is_word = grammar_.symbol(from).kind == SymbolKind::Terminal;
  double mass = 0.0;
  for (const Rule& r : grammar_.rules()) {
    if (label_index_of_symbol_[r.lhs] != marker_index) continue;
    if (r.rhs.size() <= committed.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < committed.size() && match; ++i)
      match = grammar_.name(r.rhs[i]) == committed[i];
    if (!match) continue;
    SymbolId slot = r.rhs[committed.size()];
    double chain;
    if (grammar_.symbol(slot).kind == SymbolKind::Terminal) {
      chain = (slot == from) ? 1.0 : 0.0;
    } else if (from_is_word) {
      chain = word_lc_[word_index_of_symbol_[from]][label_index_of_symbol_[slot]];
    } else {
      chain = lc_[label_index_of_symbol_[from]][label_index_of_symbol_[slot]];
    }
    mass += r.prob * chain;
  }
  return mass;
}

double PcfgActionScorer::rule_logprob(const std::string& lhs,
                                      const std::vector<std::string>& children) const {
  SymbolId l = grammar_.find(lhs);
  if (l < 0) return kNegInf;
  double p = 0.0;
  for (const Rule& r : grammar_.rules()) {
    if (r.lhs != l || r.rhs.size() != children.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < children.size() && match; ++i)
      match = grammar_.name(r.rhs[i]) == children[i];
    if (match) p += r.prob;
  }
  return p > 0.0 ? std::log(p) : kNegInf;
}

PcfgActionScorer::State PcfgActionScorer::initial() const {
  State s;
  s.log_t_top = 0.0;
  return s;
}

bool PcfgActionScorer::step(const State& s, const Action& a, double* logp,
                            State* next) const {
  ParseState core_next;
  if (!s.core.apply(a, caps_, &core_next)) return false;

  ParseState::TopView view = s.core.top_view();
  State n;
  n.core = core_next;
  n.log_inside = s.log_inside;
  n.chain = s.chain;

  double delta = kNegInf;
  switch (a.kind) {
    case ActionKind::Gen: {
      double mass;
      if (!view.has_marker) {
        // Empty stack (a lone item would have made GEN illegal).
        SymbolId w = grammar_.find(a.arg);
        if (w < 0 || grammar_.symbol(w).kind != SymbolKind::Terminal) return false;
        mass = word_lc_[word_index_of_symbol_[w]]
                       [label_index_of_symbol_[grammar_.start()]];
      } else {
        int marker = label_index(view.marker_label);
        if (marker < 0) return false;
        std::vector<std::string> committed = view.committed;
        if (view.has_top_item) committed.push_back(view.top_item_label);
        mass = attach_mass(a.arg, marker, committed);
      }
      if (mass <= 0.0) return false;
      n.log_t_top = std::log(mass);
      delta = n.log_t_top - s.log_t_top;
      break;
    }
    case ActionKind::Open: {
      int x = label_index(a.arg);
      if (x < 0) return false;
      double coupling;
      if (s.core.open_count() == 0) {
        coupling = lc_[x][label_index_of_symbol_[grammar_.start()]];
      } else {
        int marker = label_index(view.marker_label);
        if (marker < 0) return false;
        coupling = attach_mass(a.arg, marker, view.committed);
      }
      double t_new = rule_prefix_mass(x, {view.top_item_label});
      if (coupling <= 0.0 || t_new <= 0.0) return false;
      auto node = std::make_shared<CouplingNode>();
      node->log_c = std::log(coupling);
      node->below = s.chain;
      n.chain = std::move(node);
      n.log_t_top = std::log(t_new);
      delta = std::log(coupling) + n.log_t_top - s.log_t_top;
      break;
    }
    case ActionKind::Reduce: {
      if (!view.has_marker || !s.chain) return false;
      std::vector<std::string> children = view.committed;
      if (view.has_top_item) children.push_back(view.top_item_label);
      double lp_rule = rule_logprob(view.marker_label, children);
      if (lp_rule <= kNegInf) return false;
      n.log_inside += lp_rule;
      delta = lp_rule - s.log_t_top;
      n.log_t_top = s.chain->log_c;
      n.chain = s.chain->below;
      break;
    }
  }
  n.log_w = s.log_w + delta;
  *logp = delta;
  *next = std::move(n);
  return true;
}

double PcfgActionScorer::end_logprob(const State& s) const {
  if (!s.core.at_completed_root(root_label_)) return kNegInf;
  return -s.log_t_top;
}

}  // namespace coordlab

#ifndef COORDLAB_DECODER_HPP
#define COORDLAB_DECODER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "coordlab/error.hpp"
#include "coordlab/exact_scorer.hpp"
#include "coordlab/ngram_model.hpp"
#include "coordlab/oracle.hpp"
#include "coordlab/tree.hpp"
#include "coordlab/util.hpp"

namespace coordlab {

// Generative action scorer backed by the trained n-gram model. Probabilities
// are renormalized over the actions the transition system admits, with the
// sequence-end symbol sharing mass whenever the state could stop.
class NgramActionScorer {
 public:
  static constexpr int kMaxWindow = 15;

  NgramActionScorer(const ActionNgramModel* model, ActionCaps caps = {},
                    std::string root_label = "S")
      : model_(model), caps_(caps), root_label_(std::move(root_label)) {
    if (model_->order() - 1 > kMaxWindow)
      throw ConfigError("n-gram order too large for the decoder window");
    for (std::int32_t id : model_->vocab().open_ids())
      open_labels_.push_back(model_->vocab().action(id).arg);
    std::sort(open_labels_.begin(), open_labels_.end());
  }

  struct State {
    ParseState core;
    std::array<std::int32_t, kMaxWindow> window{};
    int window_len = 0;
  };

  State initial() const { return State{}; }

  bool step(const State& s, const Action& a, double* logp, State* next) const {
    std::int32_t id = model_->vocab().id_of(a);
    if (id < 0) return false;
    GroupLegal legal = group_legal(s);
    bool action_legal = (a.kind == ActionKind::Reduce && legal.reduce) ||
                        (a.kind == ActionKind::Gen && legal.gen) ||
                        (a.kind == ActionKind::Open && legal.open);
    if (!action_legal) return false;
    ParseState core_next;
    if (!s.core.apply(a, caps_, &core_next)) return false;
    *logp = model_->logprob(window_vec(s), id, legal);
    next->core = std::move(core_next);
    next->window = s.window;
    next->window_len = s.window_len;
    push_window(next, id);
    return true;
  }

  double end_logprob(const State& s) const {
    GroupLegal legal = group_legal(s);
    if (!legal.end) return kNegInf;
    return model_->logprob(window_vec(s), ActionVocab::kEnd, legal);
  }

  const std::vector<std::string>& open_labels() const { return open_labels_; }
  const ActionCaps& caps() const { return caps_; }
  const std::string& root_label() const { return root_label_; }

 private:
  GroupLegal group_legal(const State& s) const {
    LegalActions l = s.core.legal(caps_, -1, root_label_);
    GroupLegal g;
    g.gen = l.gen;
    g.open = l.open;
    g.reduce = l.reduce;
    g.end = l.finish;
    return g;
  }

  std::vector<std::int32_t> window_vec(const State& s) const {
    return std::vector<std::int32_t>(s.window.begin(),
                                     s.window.begin() + s.window_len);
  }

  void push_window(State* s, std::int32_t id) const {
    int width = model_->order() - 1;
    if (width == 0) return;
    if (s->window_len < width) {
      s->window[s->window_len++] = id;
      return;
    }
    for (int i = 0; i + 1 < width; ++i) s->window[i] = s->window[i + 1];
    s->window[width - 1] = id;
  }

  const ActionNgramModel* model_;
  ActionCaps caps_;
  std::string root_label_;
  std::vector<std::string> open_labels_;
};

struct SentenceMeasures {
  std::vector<double> surprisal;        // per word, nats, >= 0
  std::vector<double> best_posterior;   // per word, nats, <= 0
  Tree best_tree;
  bool failed = false;
  int failed_at_word = -1;
};

struct BeamConfig {
  int action_beam = 100;
  int word_beam = 10;
  double floor_logprob = -27.631021115928547;  // log(1e-12)
};

namespace detail {

struct ActionNode {
  Action act;
  std::shared_ptr<const ActionNode> parent;
};

inline ActionSequence unwind(const std::shared_ptr<const ActionNode>& node) {
  ActionSequence seq;
  for (const ActionNode* n = node.get(); n; n = n->parent.get())
    seq.push_back(n->act);
  std::reverse(seq.begin(), seq.end());
  return seq;
}

// Deterministic tie-break: lexicographic over action sequences, REDUCE
// before OPEN before GEN, then by argument.
inline int action_rank(const Action& a) {
  switch (a.kind) {
    case ActionKind::Reduce: return 0;
    case ActionKind::Open: return 1;
    case ActionKind::Gen: return 2;
  }
  return 3;
}

inline bool sequence_less(const std::shared_ptr<const ActionNode>& a,
                          const std::shared_ptr<const ActionNode>& b) {
  std::vector<const ActionNode*> pa, pb;
  for (const ActionNode* n = a.get(); n; n = n->parent.get()) pa.push_back(n);
  for (const ActionNode* n = b.get(); n; n = n->parent.get()) pb.push_back(n);
  std::size_t m = std::min(pa.size(), pb.size());
  for (std::size_t i = 0; i < m; ++i) {
    const Action& x = pa[pa.size() - 1 - i]->act;
    const Action& y = pb[pb.size() - 1 - i]->act;
    int rx = action_rank(x), ry = action_rank(y);
    if (rx != ry) return rx < ry;
    if (x.arg != y.arg) return x.arg < y.arg;
  }
  return pa.size() < pb.size();
}

template <class Model>
struct Hyp {
  typename Model::State state;
  double logp = 0.0;
  std::shared_ptr<const ActionNode> history;
};

template <class Model>
void sort_and_prune(std::vector<Hyp<Model>>* hyps, std::size_t beam) {
  std::stable_sort(hyps->begin(), hyps->end(),
                   [](const Hyp<Model>& a, const Hyp<Model>& b) {
                     if (a.logp != b.logp) return a.logp > b.logp;
                     return sequence_less(a.history, b.history);
                   });
  if (hyps->size() > beam) hyps->resize(beam);
}

template <class Model>
double mass(const std::vector<Hyp<Model>>& hyps) {
  std::vector<double> l;
  l.reserve(hyps.size());
  for (const auto& h : hyps) l.push_back(h.logp);
  return logsumexp(l);
}

// Expands hypotheses through structural actions until each generates the
// target word (or, when word is null, completes at the root and absorbs the
// end probability). Appends results to `out`.
template <class Model>
void advance(const Model& m, const std::vector<Hyp<Model>>& beam,
             const std::string* word, int action_beam,
             std::vector<Hyp<Model>>* out) {
  std::vector<Hyp<Model>> level = beam;
  int max_steps = m.caps().max_consecutive_structural;
  for (int step = 0; step <= max_steps && !level.empty(); ++step) {
    std::vector<Hyp<Model>> next_level;
    for (const Hyp<Model>& h : level) {
      if (word) {
        double lp;
        typename Model::State ns;
        if (m.step(h.state, Action::gen(*word), &lp, &ns)) {
          auto node = std::make_shared<ActionNode>();
          node->act = Action::gen(*word);
          node->parent = h.history;
          out->push_back({std::move(ns), h.logp + lp, std::move(node)});
        }
      } else {
        double elp = m.end_logprob(h.state);
        if (elp > kNegInf)
          out->push_back({h.state, h.logp + elp, h.history});
      }
      auto try_structural = [&](const Action& a) {
        double lp;
        typename Model::State ns;
        if (m.step(h.state, a, &lp, &ns)) {
          auto node = std::make_shared<ActionNode>();
          node->act = a;
          node->parent = h.history;
          next_level.push_back({std::move(ns), h.logp + lp, std::move(node)});
        }
      };
      try_structural(Action::reduce());
      for (const std::string& label : m.open_labels())
        try_structural(Action::open(label));
    }
    sort_and_prune<Model>(&next_level, action_beam);
    level = std::move(next_level);
  }
}

}  // namespace detail

// Word-synchronous beam search. Surprisal(i) is the negative log ratio of
// word-synchronized beam masses; the final word's beam is completed (reduced
// to the root, end-scored) first, so the surprisals telescope to the
// beam-estimated log-probability of the whole sentence. Best-parse posterior
// is the highest-probability state's share of its beam.
template <class Model>
SentenceMeasures word_sync_beam(const Model& m,
                                const std::vector<std::string>& sentence,
                                const BeamConfig& cfg = {}) {
  if (sentence.empty()) throw Error("word_sync_beam: empty sentence");
  SentenceMeasures out;
  const int n = static_cast<int>(sentence.size());
  out.surprisal.assign(n, 0.0);
  out.best_posterior.assign(n, 0.0);

  std::vector<detail::Hyp<Model>> beam{{m.initial(), 0.0, nullptr}};
  double prev_mass = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<detail::Hyp<Model>> generated;
    detail::advance(m, beam, &sentence[i], cfg.action_beam, &generated);
    bool last = (i == n - 1);
    if (!generated.empty() && last) {
      // Complete: reduce to the root and absorb the end probability.
      detail::sort_and_prune<Model>(&generated, cfg.word_beam);
      std::vector<detail::Hyp<Model>> completed;
      detail::advance(m, generated, nullptr, cfg.action_beam, &completed);
      generated = std::move(completed);
    }
    if (generated.empty()) {
      out.failed = true;
      out.failed_at_word = i;
      for (int k = i; k < n; ++k) {
        out.surprisal[k] = -cfg.floor_logprob;
        out.best_posterior[k] = cfg.floor_logprob;
      }
      return out;
    }
    detail::sort_and_prune<Model>(&generated, cfg.word_beam);
    double cur_mass = detail::mass(generated);
    out.surprisal[i] = -(cur_mass - prev_mass);
    out.best_posterior[i] = generated.front().logp - cur_mass;
    prev_mass = cur_mass;
    beam = std::move(generated);
  }
  out.best_tree = actions_to_tree(detail::unwind(beam.front().history));
  return out;
}

// Exhaustive reference: enumerates every action sequence consistent with the
// sentence (up to max_states expansions) and computes the same quantities
// with full sums. Throws Error("space too large") past the cap.
template <class Model>
SentenceMeasures exhaustive_measures(const Model& m,
                                     const std::vector<std::string>& sentence,
                                     std::size_t max_states = 1000000) {
  if (sentence.empty()) throw Error("exhaustive_measures: empty sentence");
  const int n = static_cast<int>(sentence.size());
  std::vector<double> word_mass(n, kNegInf);
  std::vector<double> word_best(n, kNegInf);
  double final_mass = kNegInf;
  double final_best = kNegInf;
  std::shared_ptr<const detail::ActionNode> final_best_hist;
  std::size_t expansions = 0;

  struct Frame {
    typename Model::State state;
    double logp;
    int words;
    std::shared_ptr<const detail::ActionNode> history;
    int structural;
  };
  std::vector<Frame> stack{{m.initial(), 0.0, 0, nullptr, 0}};
  int max_structural = m.caps().max_consecutive_structural;

  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (++expansions > max_states) throw Error("exhaustive_measures: space too large");

    if (f.words == n) {
      double elp = m.end_logprob(f.state);
      if (elp > kNegInf) {
        double total = f.logp + elp;
        final_mass = logadd(final_mass, total);
        if (total > final_best) {
          final_best = total;
          final_best_hist = f.history;
        }
      }
    }

    auto push = [&](const Action& a, bool is_gen) {
      double lp;
      typename Model::State ns;
      if (!m.step(f.state, a, &lp, &ns)) return;
      auto node = std::make_shared<detail::ActionNode>();
      node->act = a;
      node->parent = f.history;
      Frame nf{std::move(ns), f.logp + lp, f.words + (is_gen ? 1 : 0),
               std::move(node), is_gen ? 0 : f.structural + 1};
      if (is_gen) {
        word_mass[f.words] = logadd(word_mass[f.words], nf.logp);
        if (nf.logp > word_best[f.words]) word_best[f.words] = nf.logp;
      }
      stack.push_back(std::move(nf));
    };

    if (f.words < n) push(Action::gen(sentence[f.words]), true);
    if (f.structural < max_structural) {
      push(Action::reduce(), false);
      for (const std::string& label : m.open_labels()) push(Action::open(label), false);
    }
  }

  SentenceMeasures out;
  out.surprisal.assign(n, 0.0);
  out.best_posterior.assign(n, 0.0);
  if (final_mass <= kNegInf) {
    out.failed = true;
    out.failed_at_word = n - 1;
  }
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    double cur = (i == n - 1 && final_mass > kNegInf) ? final_mass : word_mass[i];
    double best = (i == n - 1 && final_mass > kNegInf) ? final_best : word_best[i];
    if (cur <= kNegInf) {
      out.failed = true;
      if (out.failed_at_word < 0) out.failed_at_word = i;
      break;
    }
    out.surprisal[i] = -(cur - prev);
    out.best_posterior[i] = best - cur;
    prev = cur;
  }
  if (!out.failed && final_best_hist)
    out.best_tree = actions_to_tree(detail::unwind(final_best_hist));
  return out;
}

template <class Model>
Tree best_parse(const Model& m, const std::vector<std::string>& sentence,
                const BeamConfig& cfg = {}) {
  SentenceMeasures sm = word_sync_beam(m, sentence, cfg);
  if (sm.failed) throw Error("best_parse: beam failed to parse the sentence");
  return sm.best_tree;
}

// Labeled bracketing F1 over internal nodes (preterminals included).
double bracket_f1(const Tree& gold, const Tree& predicted);

// Per-word measures table: one row per word, tab-separated
//   sentence_index word_index word surprisal best_posterior failed
void save_measures(const std::vector<SentenceMeasures>& measures,
                   const std::vector<std::vector<std::string>>& sentences,
                   const std::string& path,
                   const LanguageSpec* language = nullptr);

struct MeasuresFile {
  std::vector<SentenceMeasures> measures;
  std::vector<std::vector<std::string>> sentences;
  LanguageSpec language;
  bool has_language = false;
};
MeasuresFile load_measures(const std::string& path);

}  // namespace coordlab

#endif

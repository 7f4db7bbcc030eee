#include "coordlab/sampler.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "coordlab/error.hpp"
#include "coordlab/util.hpp"

namespace coordlab {

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "?";
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "dev") return Split::Dev;
  if (name == "test") return Split::Test;
  throw ConfigError("unknown split tag: " + name);
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t x = state_;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double Rng::next_double() {
  return (next_u64() >> 11) * 0x1.0p-53;
}

namespace {

// Expansions per symbol in the canonical serialization order (probability
// descending, then rhs names), so sampling depends only on grammar bytes and
// not on in-memory rule order.
struct ExpansionIndex {
  std::vector<std::vector<const Rule*>> by_symbol;

  explicit ExpansionIndex(const Pcfg& g) {
    by_symbol.resize(g.num_symbols());
    for (const Rule& r : g.rules()) by_symbol[r.lhs].push_back(&r);
    for (auto& rules : by_symbol) {
      std::stable_sort(rules.begin(), rules.end(),
                       [&g](const Rule* a, const Rule* b) {
                         if (a->prob != b->prob) return a->prob > b->prob;
                         std::string ka, kb;
                         for (SymbolId s : a->rhs) ka += g.name(s) + " ";
                         for (SymbolId s : b->rhs) kb += g.name(s) + " ";
                         return ka < kb;
                       });
    }
  }
};

// Returns false when the depth cap is hit.
bool expand(const Pcfg& g, const ExpansionIndex& index, SymbolId sym, Rng& rng,
            int depth, int max_depth, Tree* out) {
  if (g.symbol(sym).kind == SymbolKind::Terminal) {
    *out = Tree::word(g.name(sym));
    return true;
  }
  if (depth > max_depth) return false;
  const auto& rules = index.by_symbol[sym];
  if (rules.empty()) throw Error("no expansion for symbol " + g.name(sym));
  double u = rng.next_double();
  const Rule* chosen = rules.back();
  double acc = 0.0;
  for (const Rule* r : rules) {
    acc += r->prob;
    if (u < acc) {
      chosen = r;
      break;
    }
  }
  Tree t;
  t.label = g.name(sym);
  t.children.reserve(chosen->rhs.size());
  for (SymbolId b : chosen->rhs) {
    Tree child;
    if (!expand(g, index, b, rng, depth + 1, max_depth, &child)) return false;
    t.children.push_back(std::move(child));
  }
  *out = std::move(t);
  return true;
}

Tree sample_with_index(const Pcfg& g, const ExpansionIndex& index, Rng& rng,
                       const SampleLimits& limits, int* rejections) {
  int consecutive = 0;
  while (true) {
    Tree t;
    if (expand(g, index, g.start(), rng, 1, limits.max_depth, &t)) return t;
    ++consecutive;
    if (rejections) ++(*rejections);
    if (consecutive > limits.max_consecutive_rejections)
      throw Error("sample_tree: " + std::to_string(consecutive) +
                  " consecutive depth rejections; check rule probabilities");
  }
}

}  // namespace

Tree sample_tree(const Pcfg& g, Rng& rng, const SampleLimits& limits,
                 int* rejections) {
  ExpansionIndex index(g);
  return sample_with_index(g, index, rng, limits, rejections);
}

Corpus generate_corpus(const Pcfg& g, int n, std::uint64_t seed,
                       const SampleLimits& limits) {
  if (n < 10) throw ConfigError("corpus size must be at least 10, got " + std::to_string(n));
  ExpansionIndex index(g);
  Corpus c;
  c.language.word_order_id = g.switches().to_id();
  c.language.regime = Regime::StructureReduction;
  c.language.seed = seed;
  c.entries.resize(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(splitmix64(seed ^ static_cast<std::uint64_t>(i)));
    CorpusEntry& e = c.entries[i];
    e.tree = sample_with_index(g, index, rng, limits, nullptr);
    e.sentence = tree_yield(e.tree);
    int slot = i % 10;
    e.split = slot < 8 ? Split::Train : (slot == 8 ? Split::Dev : Split::Test);
  }
  return c;
}

namespace {

void count_coordination(const Tree& t, std::size_t* nodes) {
  if (t.leaf) return;
  if (t.children.size() == 3 && !t.children[1].leaf && t.children[1].label == "CC")
    ++(*nodes);
  for (const Tree& c : t.children) count_coordination(c, nodes);
}

}  // namespace

CorpusStats corpus_stats(const Corpus& c) {
  CorpusStats s;
  s.sentences = c.entries.size();
  std::vector<std::size_t> lengths;
  std::set<std::string> vocab;
  for (const CorpusEntry& e : c.entries) {
    lengths.push_back(e.sentence.size());
    s.words += e.sentence.size();
    for (const std::string& w : e.sentence) vocab.insert(w);
    std::size_t coord = 0;
    count_coordination(e.tree, &coord);
    s.coordination_nodes += coord;
    if (coord > 0) ++s.sentences_with_coordination;
  }
  s.vocabulary_types = vocab.size();
  if (!lengths.empty()) {
    s.mean_length = static_cast<double>(s.words) / lengths.size();
    std::sort(lengths.begin(), lengths.end());
    std::size_t m = lengths.size() / 2;
    s.median_length = lengths.size() % 2 ? lengths[m]
                                         : 0.5 * (lengths[m - 1] + lengths[m]);
  }
  return s;
}

std::string corpus_to_string(const Corpus& c) {
  std::string out;
  out += "# coordlab corpus v1\n";
  out += "# order " + std::to_string(c.language.word_order_id) + " regime " +
         regime_name(c.language.regime) + " seed " +
         std::to_string(c.language.seed) + "\n";
  for (const CorpusEntry& e : c.entries) {
    out += split_name(e.split);
    out += '\t';
    out += join(e.sentence, " ");
    out += '\t';
    out += tree_to_sexpr(e.tree);
    out += '\n';
  }
  return out;
}

Corpus corpus_from_string(const std::string& text) {
  Corpus c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto toks = split_ws(line);
      for (std::size_t i = 1; i + 1 < toks.size(); i += 2) {
        if (toks[i] == "order") c.language.word_order_id = std::stoi(toks[i + 1]);
        if (toks[i] == "regime") c.language.regime = regime_from_name(toks[i + 1]);
        if (toks[i] == "seed") c.language.seed = std::stoull(toks[i + 1]);
      }
      continue;
    }
    auto fields = split_on(line, '\t');
    if (fields.size() != 3)
      throw ConfigError("corpus line " + std::to_string(lineno) +
                        ": expected 3 tab-separated fields");
    CorpusEntry e;
    e.split = split_from_name(fields[0]);
    e.sentence = split_ws(fields[1]);
    e.tree = tree_from_sexpr(fields[2]);
    if (e.sentence != tree_yield(e.tree))
      throw ConfigError("corpus line " + std::to_string(lineno) +
                        ": sentence does not match tree yield");
    c.entries.push_back(std::move(e));
  }
  return c;
}

void save_corpus(const Corpus& c, const std::string& path) {
  write_file(path, corpus_to_string(c));
}

Corpus load_corpus(const std::string& path) {
  return corpus_from_string(read_file(path));
}

}  // namespace coordlab

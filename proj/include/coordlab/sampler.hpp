#ifndef COORDLAB_SAMPLER_HPP
#define COORDLAB_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coordlab/grammar.hpp"
#include "coordlab/tree.hpp"

namespace coordlab {

enum class Split { Train, Dev, Test };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

struct CorpusEntry {
  Tree tree;
  std::vector<std::string> sentence;  // always the tree's yield
  Split split = Split::Train;
};

struct Corpus {
  LanguageSpec language;
  std::vector<CorpusEntry> entries;
};

// Deterministic uniform double in [0,1) from a SplitMix64 stream. Keeps
// sampling independent of implementation-defined distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double next_double();

 private:
  std::uint64_t state_;
};

struct SampleLimits {
  int max_depth = 64;
  int max_consecutive_rejections = 1000;
};

// Draws one derivation tree from the grammar distribution conditioned on
// depth <= max_depth (deeper draws are transparently resampled). Throws
// Error after max_consecutive_rejections failed draws.
Tree sample_tree(const Pcfg& g, Rng& rng, const SampleLimits& limits = {},
                 int* rejections = nullptr);

// n trees with per-entry seeds derived from seed and the entry index, and a
// deterministic 8-1-1 train/dev/test split by entry index.
Corpus generate_corpus(const Pcfg& g, int n, std::uint64_t seed,
                       const SampleLimits& limits = {});

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t words = 0;
  double mean_length = 0.0;
  double median_length = 0.0;
  std::size_t coordination_nodes = 0;
  std::size_t sentences_with_coordination = 0;
  std::size_t vocabulary_types = 0;
};

CorpusStats corpus_stats(const Corpus& c);

// One record per line: split tag, sentence, bracketed tree, tab-separated.
std::string corpus_to_string(const Corpus& c);
Corpus corpus_from_string(const std::string& text);
void save_corpus(const Corpus& c, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace coordlab

#endif

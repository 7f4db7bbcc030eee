#ifndef COORDLAB_PIPELINE_HPP
#define COORDLAB_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "coordlab/grammar.hpp"
#include "coordlab/report.hpp"

namespace coordlab {

inline constexpr const char* kCoordlabVersion = "0.1.0";

// Key-value experiment configuration. Every protocol constant is a named key
// whose default matches the reference protocol (20,000 sentences, 8-1-1
// split by construction, beams 100/10, 64 word orders, 3 regimes, 3 corpus
// seeds, alpha 0.05/3).
struct Config {
  std::vector<int> word_orders;
  std::vector<Regime> regimes;
  int sentences = 20000;
  int lexicon = 1254;
  bool split_features = false;
  std::uint64_t seed = 1;
  int seeds = 3;
  int ngram_order = 5;
  int action_beam = 100;
  int word_beam = 10;
  int max_open = 64;
  int max_structural = 128;
  int depth_cap = 64;
  double alpha = 0.05 / 3.0;
  int lambda_grid = 1001;
  int workers = 1;
  RuleProbTable rule_probs;

  static Config defaults();
  // smoke: 2 orders x 200 sentences, order-3 model, small beams, 1 seed.
  // desk: 16 orders x 2,000 sentences, order-5 model, beams 100/10, 3 seeds.
  // full: the complete 64-order protocol.
  static Config preset(const std::string& scale);

  void set(const std::string& key, const std::string& value);
  static Config from_string(const std::string& text);
  static Config load(const std::string& path);

  // Canonical serialization of the effective settings; cache keys hash it.
  std::string canonical_string() const;
};

// Stage functions on explicit paths. Each writes its output artifact and is
// deterministic in its inputs.
void stage_gen(const Config& cfg, int order, int replicate,
               const std::string& grammar_out, const std::string& corpus_out);
void stage_transform(const std::string& corpus_in, Regime regime,
                     const std::string& corpus_out);
void stage_oracle(const std::string& corpus_in, const std::string& oracle_out);
void stage_train(const Config& cfg, const std::string& oracle_in,
                 const std::string& grammar_in, const std::string& model_out);
void stage_eval(const Config& cfg, const std::string& model_in,
                const std::string& corpus_in, const std::string& measures_out);
EfficiencyReport stage_report(const Config& cfg,
                              const std::vector<std::string>& measures_files,
                              const std::string& out_dir);

// Full pipeline with content-hash stage caching. Artifacts land under
// out_dir (grammar/, corpus/, oracle/, model/, measures/, report/).
EfficiencyReport run_pipeline(const Config& cfg, const std::string& out_dir,
                              std::ostream* log = nullptr);

struct VerifyCheck {
  std::string name;
  bool pass;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Small-scale cross-module checks: grammar validation, the head-final
// transform triple, expand/reduce round trips, chart scorer vs direct parse
// enumeration, and beam vs exhaustive decoding. With beams of size 1 the
// beam check reports the measured gap instead of failing.
VerifyReport verify(const Config& cfg);

}  // namespace coordlab

#endif

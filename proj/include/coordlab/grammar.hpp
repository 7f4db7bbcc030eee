#ifndef COORDLAB_GRAMMAR_HPP
#define COORDLAB_GRAMMAR_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace coordlab {

enum class SymbolKind { Nonterminal, Preterminal, Terminal };

struct Symbol {
  std::string name;
  SymbolKind kind;
};

using SymbolId = std::int32_t;

// Rule families governed by the six word-order switches.
enum class SwitchFamily {
  None,
  SubjVerb,      // S -> NP_Subj VP
  ObjVerb,       // VP -> TVerb NP_Obj, VP -> VerbComp S_Comp
  Comp,          // S_Comp -> Comp S
  Prep,          // PP -> Prep NP
  NounModifier,  // NP -> Adj NP, NP -> NP Rel VP
  CaseMarker,    // NP_Subj -> NP Subj, NP_Obj -> NP Obj
};

struct Rule {
  SymbolId lhs;
  std::vector<SymbolId> rhs;  // may contain terminal symbols (toy grammars)
  double prob;
  SwitchFamily family = SwitchFamily::None;
  bool coordination = false;  // X -> X CC X, never reordered
};

// Six binary order switches. false keeps the base rule order as written,
// true reverses the governed rules' right-hand sides.
struct SwitchConfig {
  bool subj_verb = false;
  bool obj_verb = false;
  bool comp = false;
  bool prep = false;
  bool noun_modifier = false;
  bool case_marker = false;

  // Bit layout: 0 subj_verb, 1 obj_verb, 2 comp, 3 prep, 4 noun_modifier,
  // 5 case_marker.
  static SwitchConfig from_id(int id);
  int to_id() const;

  // The configuration whose governed rules all come out head-final
  // (postpositions, OV, clause-final complementizer, prenominal relatives,
  // postnominal case markers). Subject stays before the predicate.
  static SwitchConfig head_final();

  bool operator==(const SwitchConfig& o) const = default;
};

enum class Regime { StructureReduction, NoReduction, LinearReduction };

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& name);

// One experimental language: a word order, a coordination regime, and the
// corpus seed replicate.
struct LanguageSpec {
  int word_order_id = 0;  // 0..63
  Regime regime = Regime::StructureReduction;
  std::uint64_t seed = 1;
};

struct LexiconEntry {
  std::string form;
  double prob;
};

class Pcfg {
 public:
  SymbolId intern(const std::string& name, SymbolKind kind);
  SymbolId find(const std::string& name) const;  // -1 if absent
  const Symbol& symbol(SymbolId id) const { return symbols_[id]; }
  const std::string& name(SymbolId id) const { return symbols_[id].name; }
  std::size_t num_symbols() const { return symbols_.size(); }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  void add_rule(Rule r) { rules_.push_back(std::move(r)); }
  const std::vector<Rule>& rules() const { return rules_; }
  std::vector<Rule>& mutable_rules() { return rules_; }

  void set_start(SymbolId s) { start_ = s; }
  SymbolId start() const { return start_; }

  SwitchConfig switches() const { return switches_; }
  void set_switches(SwitchConfig s) { switches_ = s; }

  // Lexical view: rules whose rhs is a single terminal, per preterminal.
  std::map<std::string, std::vector<LexiconEntry>> lexicon() const;

  // All expansions of a symbol (indices into rules()).
  std::vector<std::size_t> expansions(SymbolId lhs) const;

 private:
  std::vector<Symbol> symbols_;
  std::map<std::string, SymbolId> by_name_;
  std::vector<Rule> rules_;
  SymbolId start_ = -1;
  SwitchConfig switches_;
};

// Probability table for the base grammar: canonical rule strings
// ("NP -> Adj NP") plus "<cat> -> ::lex" for the lexical-insertion mass of
// categories that also carry coordination rules.
using RuleProbTable = std::map<std::string, double>;

RuleProbTable default_rule_probs();

struct BuildOptions {
  // Split noun/pronoun by number and verbs by tense into distinct
  // preterminals with uniform mass. No agreement is enforced.
  bool split_features = false;
};

// Constructs the base grammar: Table-1 skeleton plus a lexicon of
// lexicon_budget word forms spread over the preterminal categories
// (default proportions: nouns 500/1254, verbs 420/1254, adjectives
// 200/1254, pronouns 60/1254, function words the remainder).
// All switches false. Throws ConfigError if the probability table is
// incomplete/non-normalizing or the grammar fails validation.
Pcfg build_base_grammar(int lexicon_budget, const RuleProbTable& probs,
                        const BuildOptions& opts = {});

Pcfg build_base_grammar(int lexicon_budget);

// Returns a copy of g with the governed rules reversed for each true switch.
// Coordination rules are never reordered; probabilities are unchanged.
Pcfg apply_switches(const Pcfg& g, const SwitchConfig& s);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks probability normalization, reachability, productivity, lexicon
// uniqueness, coordination rule shape, and subcriticality. Never throws.
ValidationReport validate_grammar(const Pcfg& g);

// Spectral radius of the nonterminal expectation matrix (power iteration).
double expectation_spectral_radius(const Pcfg& g);

// Expected occurrences of each nonterminal per sentence, solving
// v = e_start + M^T v. Throws Error("divergent expectation") if the grammar
// is supercritical.
std::map<std::string, double> expected_symbol_counts(const Pcfg& g);

// Expected sentence length in words implied by expected_symbol_counts.
double expected_sentence_length(const Pcfg& g);

// Line-oriented text format: one rule per line,
//   prob<TAB>LHS<TAB>RHS1 RHS2 ...
// and lexicon lines
//   prob<TAB>PRETERMINAL<TAB>::word
// sorted by lhs name, then prob descending, then rhs, so output is
// byte-reproducible.
std::string grammar_to_string(const Pcfg& g);
Pcfg grammar_from_string(const std::string& text);
void save_grammar(const Pcfg& g, const std::string& path);
Pcfg load_grammar(const std::string& path);

}  // namespace coordlab

#endif

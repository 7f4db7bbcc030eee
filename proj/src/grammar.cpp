#include "coordlab/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "coordlab/error.hpp"
#include "coordlab/util.hpp"

namespace coordlab {

SwitchConfig SwitchConfig::from_id(int id) {
  if (id < 0 || id > 63) throw Error("switch id out of range: " + std::to_string(id));
  SwitchConfig s;
  s.subj_verb = id & 1;
  s.obj_verb = id & 2;
  s.comp = id & 4;
  s.prep = id & 8;
  s.noun_modifier = id & 16;
  s.case_marker = id & 32;
  return s;
}

int SwitchConfig::to_id() const {
  return (subj_verb ? 1 : 0) | (obj_verb ? 2 : 0) | (comp ? 4 : 0) |
         (prep ? 8 : 0) | (noun_modifier ? 16 : 0) | (case_marker ? 32 : 0);
}

SwitchConfig SwitchConfig::head_final() {
  SwitchConfig s;
  s.subj_verb = false;
  s.obj_verb = true;
  s.comp = true;
  s.prep = true;
  s.noun_modifier = true;
  s.case_marker = false;
  return s;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::StructureReduction: return "structure-reduction";
    case Regime::NoReduction: return "no-reduction";
    case Regime::LinearReduction: return "linear-reduction";
  }
  return "?";
}

Regime regime_from_name(const std::string& name) {
  if (name == "structure-reduction" || name == "structure") return Regime::StructureReduction;
  if (name == "no-reduction" || name == "none" || name == "no") return Regime::NoReduction;
  if (name == "linear-reduction" || name == "linear") return Regime::LinearReduction;
  throw ConfigError("unknown regime: " + name);
}

SymbolId Pcfg::intern(const std::string& name, SymbolKind kind) {
  auto it = by_name_.find(name);
  if (it != by_name_.end()) return it->second;
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back(Symbol{name, kind});
  by_name_.emplace(name, id);
  return id;
}

SymbolId Pcfg::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

std::map<std::string, std::vector<LexiconEntry>> Pcfg::lexicon() const {
  std::map<std::string, std::vector<LexiconEntry>> out;
  for (const Rule& r : rules_) {
    if (r.rhs.size() == 1 && symbols_[r.rhs[0]].kind == SymbolKind::Terminal) {
      out[symbols_[r.lhs].name].push_back({symbols_[r.rhs[0]].name, r.prob});
    }
  }
  return out;
}

std::vector<std::size_t> Pcfg::expansions(SymbolId lhs) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (rules_[i].lhs == lhs) out.push_back(i);
  return out;
}

RuleProbTable default_rule_probs() {
  return RuleProbTable{
      {"S -> NP_Subj VP", 1.0},
      {"VP -> IVerb", 0.55},
      {"VP -> TVerb NP_Obj", 0.35},
      {"VP -> VerbComp S_Comp", 0.10},
      {"S_Comp -> Comp S", 1.0},
      {"NP -> Noun", 0.45},
      {"NP -> Pronoun", 0.15},
      {"NP -> Adj NP", 0.15},
      {"NP -> NP PP", 0.10},
      {"NP -> NP Rel VP", 0.05},
      {"NP -> NP CC NP", 0.10},
      {"NP_Subj -> NP Subj", 1.0},
      {"NP_Obj -> NP Obj", 1.0},
      {"PP -> Prep NP", 1.0},
      {"Adj -> ::lex", 0.90},
      {"Adj -> Adj CC Adj", 0.10},
      {"IVerb -> ::lex", 0.90},
      {"IVerb -> IVerb CC IVerb", 0.10},
      {"TVerb -> ::lex", 0.90},
      {"TVerb -> TVerb CC TVerb", 0.10},
  };
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Base lexical categories with default allocation weights (totalling 1254).
struct LexCat {
  const char* name;
  int weight;
};
constexpr LexCat kLexCats[] = {
    {"Noun", 500}, {"Adj", 200},     {"IVerb", 140}, {"TVerb", 140},
    {"VerbComp", 140}, {"Pronoun", 60}, {"Comp", 13},   {"Prep", 13},
    {"Rel", 12},   {"CC", 12},      {"Subj", 12},   {"Obj", 12},
};

// Feature variants under BuildOptions::split_features.
std::vector<std::string> variants_of(const std::string& base, bool split) {
  if (!split) return {base};
  if (base == "Noun") return {"Noun_Sg", "Noun_Pl"};
  if (base == "Pronoun") return {"Pronoun_Sg", "Pronoun_Pl"};
  if (base == "IVerb") return {"IVerb_Pres", "IVerb_Past"};
  if (base == "TVerb") return {"TVerb_Pres", "TVerb_Past"};
  if (base == "VerbComp") return {"VerbComp_Pres", "VerbComp_Past"};
  return {base};
}

double table_get(const RuleProbTable& t, const std::string& key,
                 std::set<std::string>* used) {
  auto it = t.find(key);
  if (it == t.end()) {
    std::string lhs = key.substr(0, key.find(' '));
    throw ConfigError("rule probability table incomplete for lhs " + lhs +
                      " (missing \"" + key + "\")");
  }
  used->insert(key);
  return it->second;
}

}  // namespace

Pcfg build_base_grammar(int lexicon_budget) {
  return build_base_grammar(lexicon_budget, default_rule_probs(), {});
}

Pcfg build_base_grammar(int lexicon_budget, const RuleProbTable& probs,
                        const BuildOptions& opts) {
  const bool split = opts.split_features;

  // Allocate word forms to leaf categories by largest remainder, one minimum.
  std::vector<std::pair<std::string, int>> leaf_weights;
  for (const LexCat& c : kLexCats)
    for (const std::string& v : variants_of(c.name, split))
      leaf_weights.push_back({v, c.weight});
  if (lexicon_budget < static_cast<int>(leaf_weights.size()))
    throw ConfigError("lexicon budget " + std::to_string(lexicon_budget) +
                      " below preterminal category count " +
                      std::to_string(leaf_weights.size()));
  int total_weight = 0;
  for (auto& [v, w] : leaf_weights) total_weight += w;
  std::vector<int> alloc(leaf_weights.size(), 0);
  int assigned = 0;
  std::vector<std::pair<double, std::size_t>> frac;
  for (std::size_t i = 0; i < leaf_weights.size(); ++i) {
    double share = static_cast<double>(lexicon_budget) * leaf_weights[i].second / total_weight;
    alloc[i] = static_cast<int>(std::floor(share));
    assigned += alloc[i];
    frac.push_back({share - std::floor(share), i});
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t j = 0; assigned < lexicon_budget; ++j) {
    alloc[frac[j % frac.size()].second] += 1;
    ++assigned;
  }
  // Every category gets at least one form; take from the largest.
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    while (alloc[i] < 1) {
      std::size_t donor = std::max_element(alloc.begin(), alloc.end()) - alloc.begin();
      alloc[donor] -= 1;
      alloc[i] += 1;
    }
  }

  Pcfg g;
  SymbolId S = g.intern("S", SymbolKind::Nonterminal);
  g.intern("VP", SymbolKind::Nonterminal);
  g.intern("S_Comp", SymbolKind::Nonterminal);
  g.intern("NP", SymbolKind::Nonterminal);
  g.intern("NP_Subj", SymbolKind::Nonterminal);
  g.intern("NP_Obj", SymbolKind::Nonterminal);
  g.intern("PP", SymbolKind::Nonterminal);
  g.set_start(S);

  for (std::size_t i = 0; i < leaf_weights.size(); ++i)
    g.intern(leaf_weights[i].first, SymbolKind::Preterminal);

  std::set<std::string> used;
  auto sym = [&](const std::string& n) {
    SymbolId id = g.find(n);
    if (id < 0) throw Error("internal: unknown symbol " + n);
    return id;
  };

  // Structural rule from the canonical table entry; categories with feature
  // variants fan out uniformly.
  auto add_structural = [&](const std::string& lhs,
                            const std::vector<std::string>& rhs,
                            SwitchFamily family, bool coordination) {
    std::string key = lhs + " ->";
    for (const auto& r : rhs) key += " " + r;
    double p = table_get(probs, key, &used);
    std::vector<std::vector<std::string>> expanded{{}};
    for (const auto& r : rhs) {
      std::vector<std::string> vs = variants_of(r, split);
      std::vector<std::vector<std::string>> next;
      for (const auto& partial : expanded)
        for (const auto& v : vs) {
          auto p2 = partial;
          p2.push_back(v);
          next.push_back(std::move(p2));
        }
      expanded = std::move(next);
    }
    // Coordination stays within one variant: X -> X CC X per variant.
    if (coordination) {
      expanded.clear();
      for (const auto& v : variants_of(rhs[0], split))
        expanded.push_back({v, "CC", v});
    }
    const auto& lhs_vs =
        coordination ? variants_of(lhs, split) : std::vector<std::string>{lhs};
    for (const auto& lv : lhs_vs) {
      for (const auto& alt : expanded) {
        if (coordination && alt[0] != lv) continue;
        Rule rule;
        rule.lhs = sym(lv);
        for (const auto& r : alt) rule.rhs.push_back(sym(r));
        rule.prob = p / (coordination ? 1.0 : static_cast<double>(expanded.size()));
        rule.family = family;
        rule.coordination = coordination;
        g.add_rule(rule);
      }
    }
  };

  add_structural("S", {"NP_Subj", "VP"}, SwitchFamily::SubjVerb, false);
  add_structural("VP", {"IVerb"}, SwitchFamily::None, false);
  add_structural("VP", {"TVerb", "NP_Obj"}, SwitchFamily::ObjVerb, false);
  add_structural("VP", {"VerbComp", "S_Comp"}, SwitchFamily::ObjVerb, false);
  add_structural("S_Comp", {"Comp", "S"}, SwitchFamily::Comp, false);
  add_structural("NP", {"Noun"}, SwitchFamily::None, false);
  add_structural("NP", {"Pronoun"}, SwitchFamily::None, false);
  add_structural("NP", {"Adj", "NP"}, SwitchFamily::NounModifier, false);
  add_structural("NP", {"NP", "PP"}, SwitchFamily::None, false);
  add_structural("NP", {"NP", "Rel", "VP"}, SwitchFamily::NounModifier, false);
  add_structural("NP", {"NP", "CC", "NP"}, SwitchFamily::None, true);
  add_structural("NP_Subj", {"NP", "Subj"}, SwitchFamily::CaseMarker, false);
  add_structural("NP_Obj", {"NP", "Obj"}, SwitchFamily::CaseMarker, false);
  add_structural("PP", {"Prep", "NP"}, SwitchFamily::Prep, false);
  add_structural("Adj", {"Adj", "CC", "Adj"}, SwitchFamily::None, true);
  add_structural("IVerb", {"IVerb", "CC", "IVerb"}, SwitchFamily::None, true);
  add_structural("TVerb", {"TVerb", "CC", "TVerb"}, SwitchFamily::None, true);

  // Lexical insertion. Coordination-bearing categories reserve "::lex" mass;
  // plain preterminals spend their whole mass on word forms.
  std::set<std::string> coord_bases{"Adj", "IVerb", "TVerb"};
  for (std::size_t i = 0; i < leaf_weights.size(); ++i) {
    const std::string& cat = leaf_weights[i].first;
    std::string base = cat;
    for (const LexCat& c : kLexCats)
      for (const std::string& v : variants_of(c.name, split))
        if (v == cat) base = c.name;
    double mass = 1.0;
    if (coord_bases.count(base)) mass = table_get(probs, base + " -> ::lex", &used);
    SymbolId lhs = sym(cat);
    int n = alloc[i];
    for (int k = 0; k < n; ++k) {
      std::string form = lower(cat) + "." + std::to_string(k);
      Rule rule;
      rule.lhs = lhs;
      rule.rhs.push_back(g.intern(form, SymbolKind::Terminal));
      rule.prob = mass / n;
      g.add_rule(rule);
    }
  }

  for (const auto& [key, value] : probs) {
    (void)value;
    if (!used.count(key))
      throw ConfigError("rule probability table has unknown entry \"" + key + "\"");
  }

  ValidationReport report = validate_grammar(g);
  if (!report.ok())
    throw ConfigError("base grammar fails validation: " +
                      join(report.violations, "; "));
  return g;
}

Pcfg apply_switches(const Pcfg& g, const SwitchConfig& s) {
  Pcfg out = g;
  auto flips = [&](SwitchFamily f) {
    switch (f) {
      case SwitchFamily::SubjVerb: return s.subj_verb;
      case SwitchFamily::ObjVerb: return s.obj_verb;
      case SwitchFamily::Comp: return s.comp;
      case SwitchFamily::Prep: return s.prep;
      case SwitchFamily::NounModifier: return s.noun_modifier;
      case SwitchFamily::CaseMarker: return s.case_marker;
      default: return false;
    }
  };
  for (Rule& r : out.mutable_rules()) {
    if (r.coordination) continue;
    if (flips(r.family)) std::reverse(r.rhs.begin(), r.rhs.end());
  }
  SwitchConfig cur = g.switches();
  SwitchConfig nxt;
  nxt.subj_verb = cur.subj_verb != s.subj_verb;
  nxt.obj_verb = cur.obj_verb != s.obj_verb;
  nxt.comp = cur.comp != s.comp;
  nxt.prep = cur.prep != s.prep;
  nxt.noun_modifier = cur.noun_modifier != s.noun_modifier;
  nxt.case_marker = cur.case_marker != s.case_marker;
  out.set_switches(nxt);
  return out;
}

namespace {

// Expectation matrix over non-terminal symbols: M[a][b] = expected number of
// b-children per a-node.
std::vector<std::vector<double>> expectation_matrix(const Pcfg& g,
                                                    std::vector<SymbolId>* ids) {
  ids->clear();
  std::vector<int> index(g.num_symbols(), -1);
  for (SymbolId i = 0; i < static_cast<SymbolId>(g.num_symbols()); ++i) {
    if (g.symbol(i).kind != SymbolKind::Terminal) {
      index[i] = static_cast<int>(ids->size());
      ids->push_back(i);
    }
  }
  std::size_t n = ids->size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (const Rule& r : g.rules()) {
    int a = index[r.lhs];
    for (SymbolId rhs : r.rhs) {
      if (g.symbol(rhs).kind == SymbolKind::Terminal) continue;
      m[a][index[rhs]] += r.prob;
    }
  }
  return m;
}

}  // namespace

double expectation_spectral_radius(const Pcfg& g) {
  std::vector<SymbolId> ids;
  auto m = expectation_matrix(g, &ids);
  std::size_t n = ids.size();
  if (n == 0) return 0.0;
  std::vector<double> v(n, 1.0), w(n);
  double ratio = 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m[i][j] * v[j];
      w[i] = s;
      norm += s;
    }
    double vnorm = 0.0;
    for (double x : v) vnorm += x;
    if (vnorm <= 0.0 || norm <= 0.0) return 0.0;
    ratio = norm / vnorm;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  return ratio;
}

ValidationReport validate_grammar(const Pcfg& g) {
  ValidationReport rep;

  if (g.start() < 0) {
    rep.violations.push_back("no start symbol");
    return rep;
  }

  // Normalization per lhs.
  std::map<SymbolId, double> mass;
  for (const Rule& r : g.rules()) {
    if (g.symbol(r.lhs).kind == SymbolKind::Terminal)
      rep.violations.push_back("terminal on lhs: " + g.name(r.lhs));
    if (r.rhs.empty())
      rep.violations.push_back("empty rhs for lhs " + g.name(r.lhs));
    if (r.prob <= 0.0 || r.prob > 1.0)
      rep.violations.push_back("rule probability out of (0,1] for lhs " + g.name(r.lhs));
    mass[r.lhs] += r.prob;
  }
  for (auto& [lhs, sum] : mass) {
    if (std::fabs(sum - 1.0) > 1e-9)
      rep.violations.push_back("normalization: lhs " + g.name(lhs) + " sums to " +
                               format_double(sum));
  }
  for (SymbolId i = 0; i < static_cast<SymbolId>(g.num_symbols()); ++i) {
    if (g.symbol(i).kind != SymbolKind::Terminal && !mass.count(i))
      rep.violations.push_back("symbol has no expansion: " + g.name(i));
  }

  // Coordination rule shape: any rule containing CC must be X -> X CC X.
  SymbolId cc = g.find("CC");
  if (cc >= 0) {
    for (const Rule& r : g.rules()) {
      bool has_cc = false;
      for (SymbolId x : r.rhs) has_cc = has_cc || (x == cc);
      if (!has_cc) continue;
      bool shape = r.rhs.size() == 3 && r.rhs[0] == r.lhs && r.rhs[1] == cc &&
                   r.rhs[2] == r.lhs;
      if (!shape)
        rep.violations.push_back("coordination rule not of shape X -> X CC X: lhs " +
                                 g.name(r.lhs));
    }
  }

  // Reachability from start.
  std::vector<bool> reach(g.num_symbols(), false);
  std::vector<SymbolId> stack{g.start()};
  reach[g.start()] = true;
  while (!stack.empty()) {
    SymbolId a = stack.back();
    stack.pop_back();
    for (const Rule& r : g.rules()) {
      if (r.lhs != a) continue;
      for (SymbolId b : r.rhs)
        if (!reach[b]) {
          reach[b] = true;
          stack.push_back(b);
        }
    }
  }
  for (SymbolId i = 0; i < static_cast<SymbolId>(g.num_symbols()); ++i)
    if (!reach[i] && g.symbol(i).kind != SymbolKind::Terminal)
      rep.violations.push_back("unreachable symbol: " + g.name(i));

  // Productivity.
  std::vector<bool> prod(g.num_symbols(), false);
  for (SymbolId i = 0; i < static_cast<SymbolId>(g.num_symbols()); ++i)
    if (g.symbol(i).kind == SymbolKind::Terminal) prod[i] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : g.rules()) {
      if (prod[r.lhs]) continue;
      bool all = true;
      for (SymbolId b : r.rhs) all = all && prod[b];
      if (all) {
        prod[r.lhs] = true;
        changed = true;
      }
    }
  }
  for (SymbolId i = 0; i < static_cast<SymbolId>(g.num_symbols()); ++i)
    if (!prod[i] && g.symbol(i).kind != SymbolKind::Terminal)
      rep.violations.push_back("unproductive symbol: " + g.name(i));

  // Lexicon word forms globally unique (shared forms across categories are
  // different rules over the same terminal symbol).
  std::map<SymbolId, int> form_uses;
  for (const Rule& r : g.rules())
    if (r.rhs.size() == 1 && g.symbol(r.rhs[0]).kind == SymbolKind::Terminal)
      form_uses[r.rhs[0]] += 1;
  for (auto& [form, uses] : form_uses)
    if (uses > 1)
      rep.violations.push_back("lexicon form not unique: " + g.name(form));

  // Subcriticality. Skip when the basics are already broken.
  if (rep.ok()) {
    double rho = expectation_spectral_radius(g);
    if (rho >= 1.0)
      rep.violations.push_back("supercritical: expectation spectral radius " +
                               format_double(rho));
  }
  return rep;
}

std::map<std::string, double> expected_symbol_counts(const Pcfg& g) {
  double rho = expectation_spectral_radius(g);
  if (rho >= 1.0) throw Error("divergent expectation");

  std::vector<SymbolId> ids;
  auto m = expectation_matrix(g, &ids);
  std::size_t n = ids.size();
  // Solve (I - M^T) v = e_start.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  int start_row = -1;
  for (std::size_t i = 0; i < n; ++i)
    if (ids[i] == g.start()) start_row = static_cast<int>(i);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = (i == j ? 1.0 : 0.0) - m[j][i];
    a[i][n] = (static_cast<int>(i) == start_row) ? 1.0 : 0.0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-12) throw Error("divergent expectation");
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < n; ++i)
    out[g.name(ids[i])] = a[i][n] / a[i][i];
  return out;
}

double expected_sentence_length(const Pcfg& g) {
  auto counts = expected_symbol_counts(g);
  double words = 0.0;
  for (const Rule& r : g.rules()) {
    int terminals = 0;
    for (SymbolId b : r.rhs)
      if (g.symbol(b).kind == SymbolKind::Terminal) ++terminals;
    if (terminals > 0) words += counts[g.name(r.lhs)] * r.prob * terminals;
  }
  return words;
}

std::string grammar_to_string(const Pcfg& g) {
  struct Line {
    std::string lhs;
    double prob;
    std::string rhs;
    bool lexical;
  };
  std::vector<Line> lines;
  for (const Rule& r : g.rules()) {
    Line l;
    l.lhs = g.name(r.lhs);
    l.prob = r.prob;
    l.lexical = r.rhs.size() == 1 && g.symbol(r.rhs[0]).kind == SymbolKind::Terminal;
    if (l.lexical) {
      l.rhs = "::" + g.name(r.rhs[0]);
    } else {
      std::vector<std::string> names;
      for (SymbolId b : r.rhs) names.push_back(g.name(b));
      l.rhs = join(names, " ");
    }
    lines.push_back(std::move(l));
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.lhs != b.lhs) return a.lhs < b.lhs;
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.rhs < b.rhs;
  });
  std::string out;
  out += "# coordlab grammar v1\n";
  out += "# start " + g.name(g.start()) + "\n";
  out += "# switches " + std::to_string(g.switches().to_id()) + "\n";
  for (const Line& l : lines)
    out += format_double(l.prob) + "\t" + l.lhs + "\t" + l.rhs + "\n";
  return out;
}

Pcfg grammar_from_string(const std::string& text) {
  struct RawRule {
    double prob;
    std::string lhs;
    std::vector<std::string> rhs;
    bool lexical;
  };
  std::vector<RawRule> raw;
  std::string start_name = "S";
  int switch_id = 0;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto toks = split_ws(line);
      if (toks.size() >= 3 && toks[1] == "start") start_name = toks[2];
      if (toks.size() >= 3 && toks[1] == "switches") switch_id = std::stoi(toks[2]);
      continue;
    }
    auto fields = split_on(line, '\t');
    if (fields.size() != 3)
      throw ConfigError("grammar line " + std::to_string(lineno) +
                        ": expected 3 tab-separated fields");
    RawRule r;
    try {
      r.prob = std::stod(fields[0]);
    } catch (const std::exception&) {
      throw ConfigError("grammar line " + std::to_string(lineno) + ": bad probability");
    }
    r.lhs = fields[1];
    if (fields[2].rfind("::", 0) == 0) {
      r.lexical = true;
      r.rhs.push_back(fields[2].substr(2));
    } else {
      r.lexical = false;
      r.rhs = split_ws(fields[2]);
    }
    if (r.rhs.empty())
      throw ConfigError("grammar line " + std::to_string(lineno) + ": empty rhs");
    raw.push_back(std::move(r));
  }
  if (raw.empty()) throw ConfigError("grammar file has no rules");

  std::set<std::string> lhs_names;
  for (const RawRule& r : raw) lhs_names.insert(r.lhs);

  std::set<std::string> lex_lhs;
  for (const RawRule& r : raw)
    if (r.lexical) lex_lhs.insert(r.lhs);

  Pcfg g;
  for (const RawRule& r : raw)
    g.intern(r.lhs, lex_lhs.count(r.lhs) ? SymbolKind::Preterminal
                                         : SymbolKind::Nonterminal);
  for (const RawRule& r : raw) {
    Rule rule;
    rule.lhs = g.find(r.lhs);
    for (const std::string& b : r.rhs) {
      if (r.lexical) {
        rule.rhs.push_back(g.intern(b, SymbolKind::Terminal));
      } else if (lhs_names.count(b)) {
        rule.rhs.push_back(g.find(b));
      } else {
        rule.rhs.push_back(g.intern(b, SymbolKind::Terminal));
      }
    }
    rule.prob = r.prob;
    g.add_rule(rule);
  }
  SymbolId start = g.find(start_name);
  if (start < 0) throw ConfigError("grammar start symbol " + start_name + " undefined");
  g.set_start(start);
  g.set_switches(SwitchConfig::from_id(switch_id));

  // Re-derive switch families and coordination flags.
  SymbolId cc = g.find("CC");
  auto base_name = [](std::string n) {
    for (const char* v : {"_Sg", "_Pl", "_Pres", "_Past"}) {
      auto pos = n.rfind(v);
      if (pos != std::string::npos && pos + std::string(v).size() == n.size())
        return n.substr(0, pos);
    }
    return n;
  };
  for (Rule& r : g.mutable_rules()) {
    if (cc >= 0 && r.rhs.size() == 3 && r.rhs[1] == cc && r.rhs[0] == r.lhs &&
        r.rhs[2] == r.lhs) {
      r.coordination = true;
      continue;
    }
    std::string lhs = g.name(r.lhs);
    std::multiset<std::string> rhs;
    for (SymbolId b : r.rhs) rhs.insert(base_name(g.name(b)));
    auto is = [&](const char* l, std::initializer_list<const char*> names) {
      if (lhs != l || rhs.size() != names.size()) return false;
      std::multiset<std::string> want;
      for (const char* n : names) want.insert(n);
      return rhs == want;
    };
    if (is("S", {"NP_Subj", "VP"})) r.family = SwitchFamily::SubjVerb;
    else if (is("VP", {"TVerb", "NP_Obj"})) r.family = SwitchFamily::ObjVerb;
    else if (is("VP", {"VerbComp", "S_Comp"})) r.family = SwitchFamily::ObjVerb;
    else if (is("S_Comp", {"Comp", "S"})) r.family = SwitchFamily::Comp;
    else if (is("PP", {"Prep", "NP"})) r.family = SwitchFamily::Prep;
    else if (is("NP", {"Adj", "NP"})) r.family = SwitchFamily::NounModifier;
    else if (is("NP", {"NP", "Rel", "VP"})) r.family = SwitchFamily::NounModifier;
    else if (is("NP_Subj", {"NP", "Subj"})) r.family = SwitchFamily::CaseMarker;
    else if (is("NP_Obj", {"NP", "Obj"})) r.family = SwitchFamily::CaseMarker;
  }
  return g;
}

void save_grammar(const Pcfg& g, const std::string& path) {
  write_file(path, grammar_to_string(g));
}

Pcfg load_grammar(const std::string& path) {
  return grammar_from_string(read_file(path));
}

}  // namespace coordlab

#include "coordlab/decoder.hpp"

#include <map>
#include <sstream>
#include <tuple>

namespace coordlab {

namespace {

void collect_brackets(const Tree& t, int start,
                      std::map<std::tuple<std::string, int, int>, int>* out,
                      int* end) {
  if (t.leaf) {
    *end = start + 1;
    return;
  }
  int cursor = start;
  for (const Tree& c : t.children) {
    int child_end = cursor;
    collect_brackets(c, cursor, out, &child_end);
    cursor = child_end;
  }
  *end = cursor;
  (*out)[{t.label, start, cursor}] += 1;
}

}  // namespace

double bracket_f1(const Tree& gold, const Tree& predicted) {
  std::map<std::tuple<std::string, int, int>, int> g, p;
  int end = 0;
  collect_brackets(gold, 0, &g, &end);
  collect_brackets(predicted, 0, &p, &end);
  int match = 0, gc = 0, pc = 0;
  for (auto& [k, v] : g) gc += v;
  for (auto& [k, v] : p) pc += v;
  for (auto& [k, v] : p) {
    auto it = g.find(k);
    if (it != g.end()) match += std::min(v, it->second);
  }
  if (gc == 0 || pc == 0) return 0.0;
  double prec = static_cast<double>(match) / pc;
  double rec = static_cast<double>(match) / gc;
  if (prec + rec == 0.0) return 0.0;
  return 2.0 * prec * rec / (prec + rec);
}

void save_measures(const std::vector<SentenceMeasures>& measures,
                   const std::vector<std::vector<std::string>>& sentences,
                   const std::string& path, const LanguageSpec* language) {
  if (measures.size() != sentences.size())
    throw Error("save_measures: row count mismatch");
  std::string out = "# coordlab measures v1\n";
  if (language)
    out += "# language order " + std::to_string(language->word_order_id) +
           " regime " + regime_name(language->regime) + " seed " +
           std::to_string(language->seed) + "\n";
  out += "# sentence_index\tword_index\tword\tsurprisal\tbest_posterior\tfailed\n";
  for (std::size_t s = 0; s < measures.size(); ++s) {
    const SentenceMeasures& m = measures[s];
    for (std::size_t w = 0; w < sentences[s].size(); ++w) {
      out += std::to_string(s);
      out += '\t';
      out += std::to_string(w);
      out += '\t';
      out += sentences[s][w];
      out += '\t';
      out += format_double(m.surprisal[w]);
      out += '\t';
      out += format_double(m.best_posterior[w]);
      out += '\t';
      out += m.failed ? '1' : '0';
      out += '\n';
    }
  }
  write_file(path, out);
}

MeasuresFile load_measures(const std::string& path) {
  MeasuresFile f;
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto toks = split_ws(line);
      if (toks.size() >= 2 && toks[1] == "language") {
        for (std::size_t i = 2; i + 1 < toks.size(); i += 2) {
          if (toks[i] == "order") f.language.word_order_id = std::stoi(toks[i + 1]);
          if (toks[i] == "regime") f.language.regime = regime_from_name(toks[i + 1]);
          if (toks[i] == "seed") f.language.seed = std::stoull(toks[i + 1]);
        }
        f.has_language = true;
      }
      continue;
    }
    auto fields = split_on(line, '\t');
    if (fields.size() != 6)
      throw ConfigError("measures line " + std::to_string(lineno) +
                        ": expected 6 fields");
    std::size_t s = std::stoul(fields[0]);
    std::size_t w = std::stoul(fields[1]);
    if (s >= f.measures.size()) {
      f.measures.resize(s + 1);
      f.sentences.resize(s + 1);
    }
    if (w != f.sentences[s].size())
      throw ConfigError("measures line " + std::to_string(lineno) +
                        ": word indices out of order");
    f.sentences[s].push_back(fields[2]);
    f.measures[s].surprisal.push_back(std::stod(fields[3]));
    f.measures[s].best_posterior.push_back(std::stod(fields[4]));
    if (fields[5] == "1") f.measures[s].failed = true;
  }
  return f;
}

}  // namespace coordlab

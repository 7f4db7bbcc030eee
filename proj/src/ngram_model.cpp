#include "coordlab/ngram_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "coordlab/error.hpp"
#include "coordlab/util.hpp"

namespace coordlab {

ActionVocab::ActionVocab() {
  names_ = {"R", "E", "B"};
  index_ = {{"R", kReduce}, {"E", kEnd}, {"B", kBos}};
}

std::int32_t ActionVocab::intern_gen(const std::string& word) {
  std::string key = "G:" + word;
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  std::int32_t id = static_cast<std::int32_t>(names_.size());
  names_.push_back(key);
  index_.emplace(std::move(key), id);
  gen_ids_.push_back(id);
  return id;
}

std::int32_t ActionVocab::intern_open(const std::string& label) {
  std::string key = "O:" + label;
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  std::int32_t id = static_cast<std::int32_t>(names_.size());
  names_.push_back(key);
  index_.emplace(std::move(key), id);
  open_ids_.push_back(id);
  return id;
}

std::int32_t ActionVocab::find_gen(const std::string& word) const {
  auto it = index_.find("G:" + word);
  return it == index_.end() ? -1 : it->second;
}

std::int32_t ActionVocab::find_open(const std::string& label) const {
  auto it = index_.find("O:" + label);
  return it == index_.end() ? -1 : it->second;
}

std::int32_t ActionVocab::id_of(const Action& a) const {
  switch (a.kind) {
    case ActionKind::Reduce: return kReduce;
    case ActionKind::Gen: return find_gen(a.arg);
    case ActionKind::Open: return find_open(a.arg);
  }
  return -1;
}

bool ActionVocab::is_gen(std::int32_t id) const {
  return id >= 3 && names_[id][0] == 'G';
}

bool ActionVocab::is_open(std::int32_t id) const {
  return id >= 3 && names_[id][0] == 'O';
}

const std::string& ActionVocab::arg(std::int32_t id) const {
  static thread_local std::string buf;
  buf = id < 3 ? "" : names_[id].substr(2);
  return buf;
}

Action ActionVocab::action(std::int32_t id) const {
  if (id == kReduce) return Action::reduce();
  if (id < 3) throw Error("no Action form for reserved id " + std::to_string(id));
  if (is_gen(id)) return Action::gen(names_[id].substr(2));
  return Action::open(names_[id].substr(2));
}

ActionVocab ActionVocab::from_grammar(const Pcfg& g) {
  ActionVocab v;
  for (SymbolId i = 0; i < static_cast<SymbolId>(g.num_symbols()); ++i) {
    if (g.symbol(i).kind == SymbolKind::Terminal)
      v.intern_gen(g.name(i));
    else
      v.intern_open(g.name(i));
  }
  return v;
}

namespace {

std::string encode_ctx(const std::int32_t* ctx, int len) {
  std::string key;
  key.resize(static_cast<std::size_t>(len) * 4);
  if (len > 0) std::memcpy(key.data(), ctx, key.size());
  return key;
}

// Full-width context window, BOS-padded on the left.
std::vector<std::int32_t> pad_context(const std::vector<std::int32_t>& context,
                                      int width) {
  std::vector<std::int32_t> ctx(width, ActionVocab::kBos);
  int have = static_cast<int>(context.size());
  int take = std::min(have, width);
  for (int i = 0; i < take; ++i) ctx[width - take + i] = context[have - take + i];
  return ctx;
}

}  // namespace

const ActionNgramModel::Cell* ActionNgramModel::find_cell(const std::int32_t* ctx,
                                                          int len) const {
  const auto& table = counts_[len];
  auto it = table.find(encode_ctx(ctx, len));
  return it == table.end() ? nullptr : &it->second;
}

double ActionNgramModel::prob_rec(const std::int32_t* ctx, int len,
                                  std::int32_t action) const {
  if (len == 0) {
    const Cell* cell = find_cell(ctx, 0);
    double v = static_cast<double>(vocab_.event_count());
    if (!cell || cell->total == 0) return 1.0 / v;
    double t = static_cast<double>(cell->counts.size());
    auto it = cell->counts.find(action);
    double c = it == cell->counts.end() ? 0.0 : it->second;
    return (c + t / v) / (static_cast<double>(cell->total) + t);
  }
  const Cell* cell = find_cell(ctx, len);
  if (!cell || cell->total == 0) return prob_rec(ctx + 1, len - 1, action);
  double t = static_cast<double>(cell->counts.size());
  auto it = cell->counts.find(action);
  double c = it == cell->counts.end() ? 0.0 : it->second;
  double backoff = prob_rec(ctx + 1, len - 1, action);
  return (c + t * backoff) / (static_cast<double>(cell->total) + t);
}

void ActionNgramModel::group_sums(const std::int32_t* ctx, int len, double* gen_sum,
                                  double* open_sum, double* reduce_p,
                                  double* end_p) const {
  if (len == 0) {
    const Cell* cell = find_cell(ctx, 0);
    double v = static_cast<double>(vocab_.event_count());
    double gen_base = static_cast<double>(vocab_.gen_ids().size()) / v;
    double open_base = static_cast<double>(vocab_.open_ids().size()) / v;
    if (!cell || cell->total == 0) {
      *gen_sum = gen_base;
      *open_sum = open_base;
      *reduce_p = 1.0 / v;
      *end_p = 1.0 / v;
      return;
    }
    double t = static_cast<double>(cell->counts.size());
    double n = static_cast<double>(cell->total);
    auto count_of = [&](std::int32_t id) -> double {
      auto it = cell->counts.find(id);
      return it == cell->counts.end() ? 0.0 : it->second;
    };
    *gen_sum = (cell->gen_mass + t * gen_base) / (n + t);
    *open_sum = (cell->open_mass + t * open_base) / (n + t);
    *reduce_p = (count_of(ActionVocab::kReduce) + t / v) / (n + t);
    *end_p = (count_of(ActionVocab::kEnd) + t / v) / (n + t);
    return;
  }
  const Cell* cell = find_cell(ctx, len);
  if (!cell || cell->total == 0) {
    group_sums(ctx + 1, len - 1, gen_sum, open_sum, reduce_p, end_p);
    return;
  }
  double bg, bo, br, be;
  group_sums(ctx + 1, len - 1, &bg, &bo, &br, &be);
  double t = static_cast<double>(cell->counts.size());
  double n = static_cast<double>(cell->total);
  auto count_of = [&](std::int32_t id) -> double {
    auto it = cell->counts.find(id);
    return it == cell->counts.end() ? 0.0 : it->second;
  };
  *gen_sum = (cell->gen_mass + t * bg) / (n + t);
  *open_sum = (cell->open_mass + t * bo) / (n + t);
  *reduce_p = (count_of(ActionVocab::kReduce) + t * br) / (n + t);
  *end_p = (count_of(ActionVocab::kEnd) + t * be) / (n + t);
}

double ActionNgramModel::raw_prob(const std::vector<std::int32_t>& context,
                                  std::int32_t action) const {
  std::vector<std::int32_t> ctx = pad_context(context, order_ - 1);
  return prob_rec(ctx.data(), order_ - 1, action);
}

double ActionNgramModel::logprob(const std::vector<std::int32_t>& context,
                                 std::int32_t action, const GroupLegal& legal) const {
  bool action_legal =
      (action == ActionVocab::kReduce && legal.reduce) ||
      (action == ActionVocab::kEnd && legal.end) ||
      (vocab_.is_gen(action) && legal.gen) || (vocab_.is_open(action) && legal.open);
  if (!action_legal) throw Error("action_logprob: action not in the legal set");

  // Singleton legal sets score exactly zero.
  if (legal.reduce && !legal.gen && !legal.open && !legal.end) return 0.0;
  if (legal.end && !legal.gen && !legal.open && !legal.reduce) return 0.0;

  std::vector<std::int32_t> ctx = pad_context(context, order_ - 1);
  double p = prob_rec(ctx.data(), order_ - 1, action);
  double gen_sum, open_sum, reduce_p, end_p;
  group_sums(ctx.data(), order_ - 1, &gen_sum, &open_sum, &reduce_p, &end_p);
  double denom = 0.0;
  if (legal.gen) denom += gen_sum;
  if (legal.open) denom += open_sum;
  if (legal.reduce) denom += reduce_p;
  if (legal.end) denom += end_p;
  return std::log(p) - std::log(denom);
}

double ActionNgramModel::action_logprob(const std::vector<Action>& history,
                                        const Action& a, const GroupLegal& legal) const {
  std::vector<std::int32_t> ctx;
  ctx.reserve(history.size());
  for (const Action& h : history) {
    std::int32_t id = vocab_.id_of(h);
    if (id < 0) throw Error("action_logprob: history action outside the vocabulary");
    ctx.push_back(id);
  }
  std::int32_t id = vocab_.id_of(a);
  if (id < 0) throw Error("action_logprob: action outside the vocabulary");
  return logprob(ctx, id, legal);
}

double ActionNgramModel::perplexity(const std::vector<ActionSequence>& data) const {
  GroupLegal all;
  all.gen = all.open = all.reduce = all.end = true;
  double total_logp = 0.0;
  std::uint64_t events = 0;
  for (const ActionSequence& seq : data) {
    std::vector<std::int32_t> ids;
    for (const Action& a : seq) {
      std::int32_t id = vocab_.id_of(a);
      if (id < 0) throw Error("perplexity: unseen action type; extend the vocabulary");
      ids.push_back(id);
    }
    ids.push_back(ActionVocab::kEnd);
    std::vector<std::int32_t> context;
    for (std::int32_t id : ids) {
      total_logp += logprob(context, id, all);
      context.push_back(id);
      ++events;
    }
  }
  return std::exp(-total_logp / static_cast<double>(events));
}

ActionNgramModel train_action_model(const std::vector<ActionSequence>& data,
                                    const NgramConfig& config,
                                    const ActionVocab& base_vocab) {
  if (data.empty()) throw Error("train_action_model: empty training data");
  if (config.order < 1) throw ConfigError("n-gram order must be >= 1");

  ActionNgramModel m;
  m.vocab_ = base_vocab;
  m.order_ = config.order;
  m.counts_.assign(config.order, {});

  const int width = config.order - 1;
  for (const ActionSequence& seq : data) {
    std::vector<std::int32_t> ids(width, ActionVocab::kBos);
    ids.reserve(width + seq.size() + 1);
    for (const Action& a : seq) {
      switch (a.kind) {
        case ActionKind::Reduce: ids.push_back(ActionVocab::kReduce); break;
        case ActionKind::Gen: ids.push_back(m.vocab_.intern_gen(a.arg)); break;
        case ActionKind::Open: ids.push_back(m.vocab_.intern_open(a.arg)); break;
      }
    }
    ids.push_back(ActionVocab::kEnd);
    for (std::size_t pos = width; pos < ids.size(); ++pos) {
      std::int32_t action = ids[pos];
      for (int j = 0; j <= width; ++j) {
        const std::int32_t* ctx = ids.data() + pos - j;
        auto& cell = m.counts_[j][encode_ctx(ctx, j)];
        cell.total += 1;
        cell.counts[action] += 1;
        if (m.vocab_.is_gen(action)) cell.gen_mass += 1;
        if (m.vocab_.is_open(action)) cell.open_mass += 1;
      }
      ++m.events_;
    }
  }
  return m;
}

std::string ActionNgramModel::to_string() const {
  std::ostringstream out;
  out << "# coordlab action-ngram v1\n";
  out << "order " << order_ << "\n";
  out << "vocab " << vocab_.size() << "\n";
  for (std::size_t id = 3; id < vocab_.size(); ++id) {
    std::int32_t i = static_cast<std::int32_t>(id);
    out << "v " << id << " " << (vocab_.is_gen(i) ? "G:" : "O:") << vocab_.arg(i)
        << "\n";
  }
  // Top-order entries only; lower orders are rebuilt by marginalization.
  struct Entry {
    std::vector<std::int32_t> ctx;
    std::int32_t action;
    std::uint32_t count;
  };
  std::vector<Entry> entries;
  for (const auto& [key, cell] : counts_[order_ - 1]) {
    std::vector<std::int32_t> ctx(key.size() / 4);
    if (!ctx.empty()) std::memcpy(ctx.data(), key.data(), key.size());
    for (const auto& [action, count] : cell.counts)
      entries.push_back({ctx, action, count});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.ctx != b.ctx) return a.ctx < b.ctx;
    return a.action < b.action;
  });
  for (const Entry& e : entries) {
    out << "g";
    for (std::int32_t id : e.ctx) out << " " << id;
    out << " | " << e.action << " " << e.count << "\n";
  }
  return out.str();
}

ActionNgramModel ActionNgramModel::from_string(const std::string& text) {
  ActionNgramModel m;
  m.order_ = 0;
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::size_t, std::string>> vocab_lines;
  std::vector<std::string> entry_lines;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == 'g') {
      entry_lines.push_back(line);
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "order") {
      ls >> m.order_;
    } else if (tag == "v") {
      std::size_t id;
      std::string name;
      ls >> id >> name;
      vocab_lines.push_back({id, name});
    }
  }
  if (m.order_ < 1) throw ConfigError("model file: missing order");
  std::sort(vocab_lines.begin(), vocab_lines.end());
  for (auto& [id, name] : vocab_lines) {
    std::int32_t got;
    if (name.rfind("G:", 0) == 0)
      got = m.vocab_.intern_gen(name.substr(2));
    else if (name.rfind("O:", 0) == 0)
      got = m.vocab_.intern_open(name.substr(2));
    else
      throw ConfigError("model file: bad vocab entry " + name);
    if (static_cast<std::size_t>(got) != id)
      throw ConfigError("model file: non-contiguous vocabulary ids");
  }
  m.counts_.assign(m.order_, {});
  for (const std::string& entry : entry_lines) {
    std::istringstream ls(entry);
    std::string tag;
    ls >> tag;
    std::vector<std::int32_t> ctx;
    std::string tok;
    while (ls >> tok && tok != "|") ctx.push_back(std::stoi(tok));
    std::int32_t action;
    std::uint32_t count;
    if (!(ls >> action >> count))
      throw ConfigError("model file: bad count line: " + entry);
    if (static_cast<int>(ctx.size()) != m.order_ - 1)
      throw ConfigError("model file: context width mismatch");
    for (int j = 0; j <= m.order_ - 1; ++j) {
      const std::int32_t* c = ctx.data() + (ctx.size() - j);
      auto& cell = m.counts_[j][encode_ctx(c, j)];
      cell.total += count;
      cell.counts[action] += count;
      if (m.vocab_.is_gen(action)) cell.gen_mass += count;
      if (m.vocab_.is_open(action)) cell.open_mass += count;
    }
    m.events_ += count;
  }
  return m;
}

void ActionNgramModel::save(const std::string& path) const {
  write_file(path, to_string());
}

ActionNgramModel ActionNgramModel::load(const std::string& path) {
  return from_string(read_file(path));
}

}  // namespace coordlab

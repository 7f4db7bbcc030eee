#include "coordlab/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace coordlab {

static void collect_yield(const Tree& t, std::vector<std::string>* out) {
  if (t.leaf) {
    out->push_back(t.label);
    return;
  }
  for (const Tree& c : t.children) collect_yield(c, out);
}

std::vector<std::string> tree_yield(const Tree& t) {
  std::vector<std::string> out;
  collect_yield(t, &out);
  return out;
}

std::size_t internal_node_count(const Tree& t) {
  if (t.leaf) return 0;
  std::size_t n = 1;
  for (const Tree& c : t.children) n += internal_node_count(c);
  return n;
}

std::size_t tree_depth(const Tree& t) {
  std::size_t best = 0;
  for (const Tree& c : t.children) best = std::max(best, tree_depth(c));
  return best + 1;
}

static void write_sexpr(const Tree& t, std::string* out) {
  if (t.leaf) {
    *out += t.label;
    return;
  }
  *out += '(';
  *out += t.label;
  for (const Tree& c : t.children) {
    *out += ' ';
    write_sexpr(c, out);
  }
  *out += ')';
}

std::string tree_to_sexpr(const Tree& t) {
  std::string out;
  write_sexpr(t, &out);
  return out;
}

namespace {

struct SexprParser {
  const std::string& s;
  std::size_t pos = 0;

  explicit SexprParser(const std::string& str) : s(str) {}

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("tree parse error at offset " +
                             std::to_string(pos) + ": " + msg);
  }

  std::string token() {
    std::size_t start = pos;
    while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t' &&
           s[pos] != '(' && s[pos] != ')')
      ++pos;
    if (pos == start) fail("expected token");
    return s.substr(start, pos - start);
  }

  Tree parse_node() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    if (s[pos] != '(') return Tree::word(token());
    ++pos;  // '('
    skip_ws();
    Tree t;
    t.label = token();
    while (true) {
      skip_ws();
      if (pos >= s.size()) fail("unbalanced parentheses");
      if (s[pos] == ')') {
        ++pos;
        break;
      }
      t.children.push_back(parse_node());
    }
    if (t.children.empty()) fail("internal node " + t.label + " has no children");
    return t;
  }
};

}  // namespace

Tree tree_from_sexpr(const std::string& s) {
  SexprParser p(s);
  Tree t = p.parse_node();
  p.skip_ws();
  if (p.pos != s.size()) p.fail("trailing content");
  if (t.leaf) throw std::runtime_error("tree parse error: bare token is not a tree");
  return t;
}

}  // namespace coordlab

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fawb/automaton.hpp"
#include "fawb/error.hpp"
#include "fawb/symbol_class.hpp"

namespace fawb {

/// Largest accepted bound in `{n}` / `{n,m}`.
inline constexpr std::size_t kMaxRepetition = 4096;
/// Largest number of symbol positions a pattern may expand to.
inline constexpr std::size_t kMaxExpandedPositions = std::size_t{1} << 22;

namespace regex {

struct Node {
  enum class Kind { Empty, Symbol, Concat, Alt, Repeat };
  Kind kind = Kind::Empty;
  SymbolClass cls;                              // Symbol
  std::vector<std::unique_ptr<Node>> children;  // Concat, Alt, Repeat (one child)
  std::size_t min = 0;                          // Repeat
  std::optional<std::size_t> max;               // Repeat; nullopt = unbounded
};

using NodePtr = std::unique_ptr<Node>;

/// Recursive-descent parser for the supported subset:
/// literals, escapes, `.`, `[...]`, `[^...]`, concatenation, `|`, `*`, `+`,
/// `?`, `{n}`, `{n,}`, `{n,m}` and grouping.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto node = parse_alt();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unmatched ')'", pos_);
      throw ParseError("unexpected character", pos_);
    }
    return node;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  NodePtr parse_alt() {
    auto first = parse_concat();
    if (at_end() || peek() != '|') return first;
    auto alt = std::make_unique<Node>();
    alt->kind = Node::Kind::Alt;
    alt->children.push_back(std::move(first));
    while (!at_end() && peek() == '|') {
      ++pos_;
      alt->children.push_back(parse_concat());
    }
    return alt;
  }

  NodePtr parse_concat() {
    auto cat = std::make_unique<Node>();
    cat->kind = Node::Kind::Concat;
    while (!at_end() && peek() != '|' && peek() != ')') cat->children.push_back(parse_repeat());
    if (cat->children.empty()) return std::make_unique<Node>();
    if (cat->children.size() == 1) return std::move(cat->children.front());
    return cat;
  }

  NodePtr parse_repeat() {
    auto atom = parse_atom();
    while (!at_end()) {
      const char ch = peek();
      std::size_t lo = 0;
      std::optional<std::size_t> hi;
      if (ch == '*') {
        ++pos_;
      } else if (ch == '+') {
        ++pos_;
        lo = 1;
      } else if (ch == '?') {
        ++pos_;
        hi = 1;
      } else if (ch == '{') {
        parse_counted(lo, hi);
      } else {
        break;
      }
      auto rep = std::make_unique<Node>();
      rep->kind = Node::Kind::Repeat;
      rep->min = lo;
      rep->max = hi;
      rep->children.push_back(std::move(atom));
      atom = std::move(rep);
    }
    return atom;
  }

  std::size_t parse_number() {
    const std::size_t at = pos_;
    std::size_t v = 0;
    bool any = false;
    while (!at_end() && peek() >= '0' && peek() <= '9') {
      v = v * 10 + static_cast<std::size_t>(peek() - '0');
      if (v > kMaxRepetition) throw ParseError("repetition bound exceeds " + std::to_string(kMaxRepetition), at);
      any = true;
      ++pos_;
    }
    if (!any) throw ParseError("expected repetition count", at);
    return v;
  }

  void parse_counted(std::size_t& lo, std::optional<std::size_t>& hi) {
    const std::size_t open = pos_;
    ++pos_;
    lo = parse_number();
    if (!at_end() && peek() == ',') {
      ++pos_;
      if (!at_end() && peek() == '}') hi.reset();
      else hi = parse_number();
    } else {
      hi = lo;
    }
    if (at_end() || peek() != '}') throw ParseError("unterminated repetition", open);
    ++pos_;
    if (hi && *hi < lo) throw ParseError("repetition bounds out of order", open);
  }

  NodePtr symbol(const SymbolClass& cls) {
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::Symbol;
    n->cls = cls;
    return n;
  }

  NodePtr parse_atom() {
    const std::size_t at = pos_;
    const char ch = peek();
    switch (ch) {
      case '(': {
        ++pos_;
        auto inner = parse_alt();
        if (at_end() || peek() != ')') throw ParseError("unmatched '('", at);
        ++pos_;
        return inner;
      }
      case '[': return symbol(detail::parse_bracket(text_, pos_));
      case '\\': return symbol(detail::parse_escape(text_, pos_).cls);
      case '.': ++pos_; return symbol(SymbolClass::all());
      case '*':
      case '+':
      case '?':
      case '{': throw ParseError("nothing to repeat", at);
      case '^':
      case '$': throw ParseError("anchors are not supported", at);
      default: ++pos_; return symbol(SymbolClass::single(static_cast<std::uint8_t>(ch)));
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

/// Number of symbol positions after counted repetitions are expanded.
inline std::size_t expanded_positions(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Empty: return 0;
    case Node::Kind::Symbol: return 1;
    case Node::Kind::Concat:
    case Node::Kind::Alt: {
      std::size_t total = 0;
      for (const auto& c : n.children) total += expanded_positions(*c);
      return total;
    }
    case Node::Kind::Repeat: {
      const std::size_t copies = n.max ? *n.max : std::max<std::size_t>(n.min, 1);
      const std::size_t inner = expanded_positions(*n.children.front());
      if (inner && copies > kMaxExpandedPositions / inner) return kMaxExpandedPositions + 1;
      return copies * inner;
    }
  }
  return 0;
}

/// Builds fragments that never add edges into their entry state and always
/// finish on a fresh exit state with no outgoing edges; concatenation can
/// then continue directly from the previous exit without an epsilon link.
class Builder {
 public:
  explicit Builder(Automaton& a) : a_(a) {}

  StateId build(const Node& n, StateId from) {
    switch (n.kind) {
      case Node::Kind::Empty: {
        const StateId to = a_.add_state();
        a_.add_epsilon(from, to);
        return to;
      }
      case Node::Kind::Symbol: {
        const StateId to = a_.add_state();
        a_.add_edge(from, n.cls, to);
        return to;
      }
      case Node::Kind::Concat: {
        StateId at = from;
        for (const auto& c : n.children) at = build(*c, at);
        return at;
      }
      case Node::Kind::Alt: {
        std::vector<StateId> ends;
        for (const auto& c : n.children) ends.push_back(build(*c, from));
        const StateId to = a_.add_state();
        for (auto e : ends) a_.add_epsilon(e, to);
        return to;
      }
      case Node::Kind::Repeat: return build_repeat(n, from);
    }
    return from;
  }

 private:
  StateId build_star(const Node& body, StateId from) {
    const StateId head = a_.add_state();
    a_.add_epsilon(from, head);
    const StateId end = build(body, head);
    a_.add_epsilon(end, head);
    const StateId to = a_.add_state();
    a_.add_epsilon(head, to);
    return to;
  }

  StateId build_optional(const Node& body, StateId from) {
    const StateId end = build(body, from);
    const StateId to = a_.add_state();
    a_.add_epsilon(from, to);
    a_.add_epsilon(end, to);
    return to;
  }

  StateId build_repeat(const Node& n, StateId from) {
    const Node& body = *n.children.front();
    StateId at = from;
    if (!n.max && n.min >= 1) {
      // x{n,} with n >= 1: n-1 plain copies, then x+.
      for (std::size_t i = 0; i + 1 < n.min; ++i) at = build(body, at);
      const StateId head = a_.add_state();
      a_.add_epsilon(at, head);
      const StateId end = build(body, head);
      a_.add_epsilon(end, head);
      const StateId to = a_.add_state();
      a_.add_epsilon(end, to);
      return to;
    }
    for (std::size_t i = 0; i < n.min; ++i) at = build(body, at);
    if (!n.max) return build_star(body, at);
    for (std::size_t i = n.min; i < *n.max; ++i) at = build_optional(body, at);
    if (at == from) {
      const StateId to = a_.add_state();
      a_.add_epsilon(from, to);
      return to;
    }
    return at;
  }

  Automaton& a_;
};

inline NodePtr parse(std::string_view text) {
  auto root = Parser(text).parse();
  if (expanded_positions(*root) > kMaxExpandedPositions) throw ParseError("expanded pattern too large", 0);
  return root;
}

}  // namespace regex

/// Symbol positions of `text` once counted repetitions are expanded; used as
/// the size axis of per-pattern experiments.
inline std::size_t regex_size(std::string_view text) { return regex::expanded_positions(*regex::parse(text)); }

/// Thompson-style construction of an anchored, full-match NFA for `text`.
/// State 0 is the single start and carries `start_kind`.
inline Automaton compile_regex(std::string_view text, StartKind start_kind = StartKind::StartOfData) {
  if (start_kind == StartKind::None) throw std::invalid_argument("compile_regex: start kind must not be none");
  auto root = regex::parse(text);
  Automaton a;
  const StateId start = a.add_state();
  a.starts[start] = start_kind;
  const StateId end = regex::Builder(a).build(*root, start);
  a.accepts.insert(end);
  return a;
}

}  // namespace fawb

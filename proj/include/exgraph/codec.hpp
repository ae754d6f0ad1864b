#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "exgraph/graph.hpp"
#include "exgraph/structure.hpp"

namespace exgraph {

/// Raised by the graph codecs on malformed input. `position` is a byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, std::string reason)
      : std::runtime_error("parse error at " + std::to_string(position) + ": " + reason),
        position_(position),
        reason_(std::move(reason)) {}

  std::size_t position() const { return position_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

inline constexpr std::string_view kFieldSeparator = "; ";

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view body) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = body.find(kFieldSeparator, start);
    if (pos == std::string_view::npos) {
      fields.push_back(body.substr(start));
      return fields;
    }
    fields.push_back(body.substr(start, pos - start));
    start = pos + kFieldSeparator.size();
  }
}

inline void add_parsed_edge(Graph& g, std::string_view src, std::string_view rel,
                            std::string_view dst, std::size_t pos) {
  try {
    g.add_edge(src, rel, dst);
  } catch (const GraphError& e) {
    throw ParseError(pos, e.what());
  }
}

}  // namespace detail

// "(concept; relation; concept)(...)..." -> Graph. Nodes are numbered in
// first-mention order and repeated labels refer to the same node.
inline Graph parse_linearized(std::string_view text) {
  Graph g;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    if (text[i] != '(') throw ParseError(i, "expected '('");
    const std::size_t open = i;
    std::size_t close = open + 1;
    while (close < text.size() && text[close] != ')') {
      if (text[close] == '(') throw ParseError(close, "nested '(' inside edge");
      ++close;
    }
    if (close == text.size()) throw ParseError(open, "unbalanced bracket");
    const std::string_view body = text.substr(open + 1, close - open - 1);
    const auto fields = detail::split_fields(body);
    if (fields.size() != 3) {
      throw ParseError(open, "expected 3 fields, found " + std::to_string(fields.size()));
    }
    for (const auto& f : fields) {
      if (trim(f).empty()) throw ParseError(open, "empty field");
    }
    detail::add_parsed_edge(g, fields[0], fields[1], fields[2], open);
    i = close + 1;
  }
  return g;
}

namespace detail {

inline void check_linearizable(std::string_view s) {
  for (char c : s) {
    if (c == ';' || c == '(' || c == ')') {
      throw std::invalid_argument("label '" + std::string(s) +
                                  "' contains a reserved character (';', '(' or ')')");
    }
  }
}

}  // namespace detail

/// Edges in canonical DFS order, no separators between groups. Nodes without
/// edges are not representable and are dropped.
inline std::string serialize_linearized(const Graph& g) {
  std::string out;
  for (const Edge& e : canonical_edge_order(g)) {
    const std::string& s = g.label(e.src);
    const std::string& d = g.label(e.dst);
    detail::check_linearizable(s);
    detail::check_linearizable(e.relation);
    detail::check_linearizable(d);
    out += '(';
    out += s;
    out += kFieldSeparator;
    out += e.relation;
    out += kFieldSeparator;
    out += d;
    out += ')';
  }
  return out;
}

// ---------------------------------------------------------------------------
// DOT subset:  digraph [name] { "A" -> "B" [label="rel"]; "C"; }

namespace detail {

class DotLexer {
 public:
  explicit DotLexer(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size()) {
      if (is_space(text_[pos_])) {
        ++pos_;
      } else if (text_.substr(pos_, 2) == "//") {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  bool peek(std::string_view tok) {
    skip_ws();
    return text_.substr(pos_, tok.size()) == tok;
  }

  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) throw ParseError(pos_, "expected '" + std::string(tok) + "'");
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (is_alnum(text_[pos_]) || text_[pos_] == '_')) ++pos_;
    if (start == pos_) throw ParseError(pos_, "expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted() {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '"') throw ParseError(pos_, "expected '\"'");
    const std::size_t start = pos_++;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) throw ParseError(start, "unterminated string");
    ++pos_;
    return out;
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

inline Graph parse_dot(std::string_view text) {
  detail::DotLexer lex(text);
  if (lex.identifier() != "digraph") throw ParseError(0, "expected 'digraph'");
  if (!lex.peek("{")) lex.identifier();
  lex.expect("{");
  Graph g;
  while (!lex.accept("}")) {
    if (lex.at_end()) throw ParseError(lex.pos(), "unbalanced brace");
    const std::size_t stmt = lex.pos();
    std::string src = lex.quoted();
    if (!lex.accept("->")) {
      try {
        g.add_node(src);
      } catch (const GraphError& e) {
        throw ParseError(stmt, e.what());
      }
      lex.accept(";");
      continue;
    }
    std::string dst = lex.quoted();
    if (!lex.accept("[")) throw ParseError(lex.pos(), "edge statement missing label attribute");
    if (lex.identifier() != "label") throw ParseError(lex.pos(), "unsupported attribute");
    lex.expect("=");
    std::string rel = lex.quoted();
    lex.expect("]");
    lex.accept(";");
    detail::add_parsed_edge(g, src, rel, dst, stmt);
  }
  if (!lex.at_end()) throw ParseError(lex.pos(), "trailing content after '}'");
  return g;
}

/// Edge statements in canonical order; isolated nodes follow as node
/// statements in label order.
inline std::string serialize_dot(const Graph& g) {
  std::string out = "digraph {\n";
  std::vector<bool> touched(g.node_count(), false);
  for (const Edge& e : canonical_edge_order(g)) {
    touched[e.src] = touched[e.dst] = true;
    out += "  " + detail::dot_quote(g.label(e.src)) + " -> " + detail::dot_quote(g.label(e.dst)) +
           " [label=" + detail::dot_quote(e.relation) + "];\n";
  }
  std::vector<std::string> isolated;
  for (const Node& n : g.nodes())
    if (!touched[n.id]) isolated.push_back(n.label);
  std::sort(isolated.begin(), isolated.end());
  for (const auto& label : isolated) out += "  " + detail::dot_quote(label) + ";\n";
  out += "}\n";
  return out;
}

enum class GraphFormat { linearized, dot };

inline Graph parse_graph(std::string_view text, GraphFormat format) {
  return format == GraphFormat::dot ? parse_dot(text) : parse_linearized(text);
}

inline std::string serialize_graph(const Graph& g, GraphFormat format) {
  return format == GraphFormat::dot ? serialize_dot(g) : serialize_linearized(g);
}

}  // namespace exgraph

#include <gtest/gtest.h>

#include "support.hpp"

using namespace exgraph;
using namespace testsupport;

namespace {

std::string reason_of(std::string_view text) {
  try {
    parse_linearized(text);
  } catch (const ParseError& e) {
    return e.reason();
  }
  return "";
}

}  // namespace

TEST(Linearized, ParsesTwoEdges) {
  Graph g = parse_linearized("(mcdonalds; is a; fast food)(fast food; capable of; unhealthy)");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.label(0), "mcdonalds");
  EXPECT_EQ(g.label(1), "fast food");
  EXPECT_TRUE(g.has_edge(Triple{"fast food", "capable of", "unhealthy"}));
}

TEST(Linearized, Errors) {
  EXPECT_EQ(reason_of("(a; is a; b"), "unbalanced bracket");
  EXPECT_EQ(reason_of("(a; b)"), "expected 3 fields, found 2");
  EXPECT_EQ(reason_of("(a; ; b)"), "empty field");
  EXPECT_EQ(reason_of("(a; r; (b))"), "nested '(' inside edge");
  EXPECT_EQ(reason_of("x(a; r; b)"), "expected '('");
  EXPECT_NE(reason_of("(a; r; a)"), "");            // self-loop
  EXPECT_NE(reason_of("(a; r; b)(A; r; b)"), "");   // duplicate triple
}

TEST(Linearized, ErrorPositionPointsAtGroup) {
  try {
    parse_linearized("(a; r; b) (c; d)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 10u);
  }
}

TEST(Linearized, TrimsFieldsAndSkipsWhitespaceBetweenGroups) {
  Graph g = parse_linearized("  ( A ;  is a ; B )\n(b; r; c)  ");
  EXPECT_TRUE(g.has_edge(Triple{"a", "is a", "b"}));
  EXPECT_EQ(g.node_count(), 3u);
}

TEST(Linearized, SerializeExamples) {
  Graph chain = parse_linearized("(b; r2; c)(a; r1; b)");
  EXPECT_EQ(serialize_linearized(chain), "(a; r1; b)(b; r2; c)");
  EXPECT_EQ(serialize_linearized(Graph{}), "");
  EXPECT_EQ(parse_linearized("").node_count(), 0u);
  Graph diamond = parse_linearized("(c; r; d)(a; r; c)(b; r; d)(a; r; b)");
  EXPECT_EQ(serialize_linearized(diamond), "(a; r; b)(b; r; d)(a; r; c)(c; r; d)");
}

TEST(Linearized, RejectsReservedCharactersOnSerialize) {
  Graph g;
  g.add_edge("a;b", "r", "c");
  EXPECT_THROW(serialize_linearized(g), std::invalid_argument);
  Graph h;
  h.add_edge("a", "r", "c (d)");
  EXPECT_THROW(serialize_linearized(h), std::invalid_argument);
}

TEST(Linearized, RoundTrip) {
  Rng rng(21);
  const RelationSet r = explagraphs_relations();
  for (int i = 0; i < 500; ++i) {
    Graph g = random_valid_graph(rng, r, 2, 2, rng.index(4), rng.index(4));
    const std::string s = serialize_linearized(g);
    Graph back = parse_linearized(s);
    ASSERT_TRUE(same_graph(g, back)) << s;
    ASSERT_EQ(serialize_linearized(back), s);
  }
}

TEST(Linearized, FuzzNeverCrashes) {
  Rng rng(99);
  const std::string alphabet = "(); ab\t\n\x01\xff";
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    const std::size_t len = rng.index(40);
    for (std::size_t k = 0; k < len; ++k)
      s.push_back(rng.index(2) ? alphabet[rng.index(alphabet.size())]
                               : static_cast<char>(rng.index(256)));
    try {
      Graph g = parse_linearized(s);
      (void)g;
    } catch (const ParseError&) {
    }
  }
}

TEST(Dot, ParsesSingleEdge) {
  Graph g = parse_dot(R"(digraph { "e1" -> "e2" [label="before"]; })");
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_TRUE(g.has_edge(Triple{"e1", "before", "e2"}));
}

TEST(Dot, NamedGraphCommentsAndIsolatedNodes) {
  Graph g = parse_dot("digraph G {\n // story\n \"a\" -> \"b\" [label=\"after\"]\n \"lonely\";\n}\n");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(Dot, Errors) {
  EXPECT_THROW(parse_dot(R"(digraph { "a" -> "b"; })"), ParseError);
  EXPECT_THROW(parse_dot(R"(graph { "a" -> "b" [label="x"]; })"), ParseError);
  EXPECT_THROW(parse_dot(R"(digraph { "a" -> "b" [label="x"]; )"), ParseError);
  EXPECT_THROW(parse_dot(R"(digraph { "a" -> "b" [color="x"]; })"), ParseError);
  EXPECT_THROW(parse_dot(R"(digraph { "a" -> "b" [label="x"]; } extra)"), ParseError);
  EXPECT_THROW(parse_dot(R"(digraph { subgraph { } })"), ParseError);
}

TEST(Dot, SerializeFormat) {
  Graph g;
  g.add_edge("b", "after", "a");
  g.add_node("z");
  EXPECT_EQ(serialize_dot(g), "digraph {\n  \"b\" -> \"a\" [label=\"after\"];\n  \"z\";\n}\n");
}

TEST(Dot, EscapedQuotesRoundTrip) {
  Graph g;
  g.add_edge("say \"hi\"", "before", "back\\slash");
  Graph back = parse_dot(serialize_dot(g));
  EXPECT_TRUE(same_graph(g, back));
}

TEST(Dot, RoundTripRandomTemporal) {
  Rng rng(4);
  const RelationSet t = temporal_relations();
  for (int i = 0; i < 500; ++i) {
    Graph g = random_any_graph(rng, t, 1 + rng.index(7), rng.index(10), "event ");
    const std::string d = serialize_dot(g);
    Graph back = parse_dot(d);
    ASSERT_TRUE(same_graph(g, back)) << d;
    ASSERT_EQ(serialize_dot(back), d);
  }
}

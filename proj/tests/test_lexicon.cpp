#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace exgraph;
using namespace testsupport;

TEST(Lexicon, ParsesAndNormalizes) {
  std::istringstream in("Loss\tnoun\tgoing, Deprivation ,loss,going\nloss\tverb\tmisplace\n\n");
  Lexicon lex = parse_lexicon(in);
  EXPECT_EQ(lex.candidates("LOSS", PosTag::noun), (std::vector<std::string>{"going", "deprivation"}));
  EXPECT_EQ(lex.candidates("loss", PosTag::verb), std::vector<std::string>{"misplace"});
  EXPECT_TRUE(lex.candidates("loss", PosTag::adj).empty());
  ASSERT_EQ(lex.entries("loss").size(), 2u);
  EXPECT_EQ(lex.entries("loss")[0].pos, PosTag::noun);
}

TEST(Lexicon, FormatErrorsCarryLineNumbers) {
  std::istringstream bad_pos("a\tnoun\tb\nc\tpreposition\td\n");
  try {
    parse_lexicon(bad_pos);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream cols("a\tnoun\n");
  EXPECT_THROW(parse_lexicon(cols), FormatError);
  std::istringstream empty("");
  EXPECT_NO_THROW(parse_lexicon(empty));
}

TEST(Embeddings, ParseAndValidate) {
  std::istringstream in("a 1 0\nb 0.5 0.5\nzero 0 0\n");
  EmbeddingTable t = parse_embeddings(in);
  EXPECT_EQ(t.dimension(), 2u);
  ASSERT_NE(t.find("A"), nullptr);
  EXPECT_EQ(t.find("zero"), nullptr);  // zero vectors carry no direction

  std::istringstream dim("a 1 0\nb 1 0 0\n");
  try {
    parse_embeddings(dim);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream nan("a 1 x\n");
  EXPECT_THROW(parse_embeddings(nan), FormatError);
}

TEST(Cosine, Basics) {
  EXPECT_DOUBLE_EQ(cosine({1, 0}, {2, 0}), 1.0);
  EXPECT_NEAR(cosine({1, 0}, {0, 3}), 0.0, 1e-15);
  EXPECT_NEAR(cosine({1, 1}, {1, 0}), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(BestSynonym, ArgmaxWithLexicographicTieBreak) {
  std::istringstream lin("w\tnoun\tzeta,alpha,far\n");
  std::istringstream ein("w 1 0\nzeta 2 0\nalpha 3 0\nfar 0 1\n");
  Lexicon lex = parse_lexicon(lin);
  EmbeddingTable emb = parse_embeddings(ein);
  EXPECT_EQ(best_synonym("w", PosTag::noun, lex, emb), "alpha");
  EXPECT_FALSE(best_synonym("w", PosTag::verb, lex, emb));
  EXPECT_FALSE(best_synonym("unknown", PosTag::noun, lex, emb));
}

TEST(BestSynonym, NoneWhenCandidatesLackVectors) {
  std::istringstream lin("w\tnoun\tx,y\n");
  std::istringstream ein("w 1 0\n");
  EXPECT_FALSE(best_synonym("w", PosTag::noun, parse_lexicon(lin), parse_embeddings(ein)));
}

TEST(BundledSamples, Load) {
  Lexicon lex = load_lexicon(source_path("samples/lexicon.tsv"));
  EmbeddingTable emb = load_embeddings(source_path("samples/embeddings.txt"));
  EXPECT_EQ(best_synonym("loss", PosTag::noun, lex, emb), "going");
  EXPECT_EQ(best_synonym("jobs", PosTag::noun, lex, emb), "business");
}

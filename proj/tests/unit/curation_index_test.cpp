#include <gtest/gtest.h>

#include "rlvr/curation/ngram_index.hpp"
#include "rlvr/curation/tokenizer.hpp"
#include "support/corpus_gen.hpp"

using namespace rlvr::curation;
using Tokens = std::vector<std::string>;

TEST(Tokenizer, LowercasesAndSplitsOnPunctuation) {
  EXPECT_EQ(tokenize("Find the SUM of x+y, where x=3."),
            (Tokens{"find", "the", "sum", "of", "x", "y", "where", "x", "3"}));
}

TEST(Tokenizer, StripsMarkupCommands) {
  EXPECT_EQ(tokenize(R"(Compute $\frac{1}{2}\cdot\sqrt{8}$.)"),
            (Tokens{"compute", "1", "2", "8"}));
  EXPECT_EQ(tokenize(R"(\textbf{Problem} 3)"), (Tokens{"problem", "3"}));
}

TEST(Tokenizer, NfkcFoldsCompatibilityForms) {
  EXPECT_EQ(tokenize("ﬁnd Ｘ²"), (Tokens{"find", "x2"}));
  EXPECT_EQ(tokenize("Ⅻ"), (Tokens{"xii"}));
}

TEST(Tokenizer, KeepsDigitsAndOtherScripts) {
  EXPECT_EQ(tokenize("2024 AIME"), (Tokens{"2024", "aime"}));
  EXPECT_EQ(tokenize("Σύνολο: 5"), (Tokens{"σύνολο", "5"}));
  EXPECT_TRUE(tokenize("  ,.;  ").empty());
}

TEST(NGramIndex, SmallExample) {
  NGramIndex idx({"a b c d"}, 3);
  EXPECT_EQ(idx.size(), 2u);
  EXPECT_TRUE(idx.contains(Tokens{"a", "b", "c"}));
  EXPECT_TRUE(idx.contains(Tokens{"b", "c", "d"}));
  EXPECT_FALSE(idx.contains(Tokens{"a", "c", "d"}));
  EXPECT_FALSE(idx.contains(Tokens{"a", "b"}));
  EXPECT_EQ(idx.tokenizer_version(), kTokenizerVersion);
}

TEST(NGramIndex, WindowLongerThanEveryTextGivesEmptyIndex) {
  NGramIndex idx({"one two three", "four five"}, 4);
  EXPECT_EQ(idx.size(), 0u);
  EXPECT_EQ(idx.windows_seen(), 0u);
  EXPECT_FALSE(idx.is_contaminated("one two three four five six"));
}

TEST(NGramIndex, RejectsZeroN) {
  EXPECT_THROW(NGramIndex({"a"}, 0), std::invalid_argument);
}

TEST(NGramIndex, WindowCountMatchesEnumeration) {
  rlvr::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    auto c = rlvr::testing::make_contamination_case(rng.next_u64(), n);
    std::size_t expected = 0;
    std::set<Tokens> distinct;
    for (const auto& doc : c.corpus) {
      const auto t = tokenize(doc);
      for (std::size_t i = 0; i + n <= t.size(); ++i) {
        ++expected;
        distinct.insert(Tokens(t.begin() + i, t.begin() + i + n));
      }
    }
    NGramIndex idx(c.corpus, n);
    EXPECT_EQ(idx.windows_seen(), expected);
    EXPECT_EQ(idx.size(), distinct.size());
    for (const auto& w : distinct) EXPECT_TRUE(idx.contains(w));
  }
}

TEST(NGramIndex, NineTokenOverlapDetectedEightMissed) {
  const std::string bench =
      "Let a and b be positive integers such that the least common multiple of a and b is 360. "
      "Find the number of ordered pairs.";
  NGramIndex idx({bench}, 9);
  // Nine consecutive benchmark tokens: "the least common multiple of a and b is".
  EXPECT_TRUE(idx.is_contaminated("Suppose the least common multiple of a and b is 24; find a."));
  // Only eight: "least common multiple of a and b is".
  EXPECT_FALSE(idx.is_contaminated("Suppose their least common multiple of a and b is 24; find a."));
  // Markup and case differences do not hide the overlap.
  EXPECT_TRUE(idx.is_contaminated(
      R"(THE \textit{least} common multiple of $a$ and $b$ is $\mathbf{12}$)"));
}

TEST(NGramIndex, QueryWithUnknownTokens) {
  NGramIndex idx({"p q r s t"}, 3);
  EXPECT_FALSE(idx.is_contaminated("p q zz r s"));
  EXPECT_TRUE(idx.is_contaminated("zz q r s zz"));
}

class ContaminationFuzz : public ::testing::TestWithParam<std::size_t> {};

TEST_P(ContaminationFuzz, AgreesWithBruteForce) {
  const std::size_t n = GetParam();
  int positives = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto c = rlvr::testing::make_contamination_case(rlvr::derive_seed(77, seed, n), n);
    NGramIndex idx(c.corpus, n);
    const bool expected = rlvr::testing::brute_force_contaminated(c.corpus, c.query, n);
    positives += expected;
    ASSERT_EQ(idx.is_contaminated(c.query), expected) << "seed " << seed << " query: " << c.query;
  }
  // Both outcomes are exercised.
  EXPECT_GT(positives, 30);
  EXPECT_LT(positives, 270);
}

INSTANTIATE_TEST_SUITE_P(WindowSizes, ContaminationFuzz, ::testing::Values(1, 2, 5, 9, 14));

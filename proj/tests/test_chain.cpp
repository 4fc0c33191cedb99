#include "oplab/chain.hpp"
#include "oplab/dsl.hpp"

#include "word_gen.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace oplab;

#ifndef OPLAB_GOLDEN_DIR
#error "OPLAB_GOLDEN_DIR must point at the golden files"
#endif

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Psi, Examples) {
  const std::vector<double> t{0.3};
  const std::vector<double> p{2.5, 1.7};
  EXPECT_DOUBLE_EQ(psi_exponent(t, p), (2.5 - 0.3) * 1.7 + 0.3);
  EXPECT_DOUBLE_EQ(psi_exponent(std::vector<double>{0.5, 0.5}, std::vector<double>{2, 3, 2, 3}), 29.0);
}

TEST(Psi, AllOnesTelescopesToOne) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 1; n <= 6; ++n)
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> t(n);
      for (auto& x : t) x = u(rng);
      EXPECT_EQ(psi_exponent(t, std::vector<double>(2 * n, 1.0)), 1.0);
    }
}

TEST(Psi, LengthMismatch) {
  EXPECT_THROW(psi_exponent(std::vector<double>{0.5}, std::vector<double>{1, 1, 1}), RangeError);
}

TEST(Psi, MonotoneInEachP) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ut(0, 1), up(1, 6);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + rep % 3;
    std::vector<double> t(n), p(2 * n);
    for (auto& x : t) x = ut(rng);
    for (auto& x : p) x = up(rng);
    const double base = psi_exponent(t, p);
    for (int i = 0; i < 2 * n; ++i) {
      auto q = p;
      q[i] += 0.01;
      EXPECT_GE(psi_exponent(t, q), base);
    }
  }
}

TEST(NecessityWeight, Examples) {
  ParamSet ps{1, 3, {1.0}, {1, 1}, 2.0, {1, 1}};
  EXPECT_DOUBLE_EQ(necessity_weight(ps), 0.5);
  ParamSet ps2{2, 5, {0.5, 0.5}, {2, 3, 2, 3}, 1.0, {1, 1, 1, 1}};
  EXPECT_NEAR(necessity_weight(ps2), 0.5 / 29.5, 1e-15);
  ParamSet ps3{1, 3, {0.5}, {1, 1}, 0.5 + 1e-9, {1, 1}};
  EXPECT_LT(necessity_weight(ps3), 1e-8);
  ps3.r = 0.5;
  EXPECT_THROW(necessity_weight(ps3), RangeError);
}

TEST(ParamSet, Validation) {
  EXPECT_NO_THROW(ParamSet::make(5, {0.5, 0.5}, {1, 1, 1, 1}, 1.0, {1, 1, 1, 1}));
  EXPECT_NO_THROW(ParamSet::make(4, {0.5, 0.5}, {1, 1, 1, 1}, 1.0, {1, 1, 1}));
  EXPECT_THROW(ParamSet::make(5, {0.5, 0.5}, {1, 1, 1, 1}, 1.0, {1, 1, 1}), RangeError);
  EXPECT_THROW(ParamSet::make(3, {1.5}, {1, 1}, 2.0, {1, 1}), RangeError);
  EXPECT_THROW(ParamSet::make(3, {0.5}, {0.9, 1}, 2.0, {1, 1}), RangeError);
  EXPECT_THROW(ParamSet::make(3, {0.5}, {1, 1}, 0.5, {1, 1}), RangeError);
  EXPECT_THROW(ParamSet::make(3, {0.5}, {1, 1}, 1.0, {1.2, 1}), RangeError);
  EXPECT_THROW(ParamSet::make(1, {}, {}, 1.0, {}), RangeError);
  const auto b = ParamSet::make(3, {0.25}, {2, 3}, 1.5, {0.5, 0.75}).bindings();
  EXPECT_EQ(b.at("t1"), 0.25);
  EXPECT_EQ(b.at("p2"), 3.0);
  EXPECT_EQ(b.at("w2"), 0.75);
  EXPECT_EQ(b.at("r"), 1.5);
}

TEST(Schedules, AscendingExamples) {
  for (int n = 1; n <= 5; ++n) {
    const int k = 2 * n + 1;
    EXPECT_EQ(ascending_index(1, 0, k), 1);
    if (n >= 2) {
      EXPECT_EQ(ascending_index(2, 2 * n - 1, k), 2 * n + 1);
    }
    EXPECT_EQ(ascending_index(n, 1, k), n + 1);
  }
  EXPECT_THROW(ascending_index(0, 0, 5), RangeError);
  EXPECT_THROW(ascending_index(3, 0, 5), RangeError);
  EXPECT_THROW(ascending_index(1, 4, 5), RangeError);
}

TEST(Schedules, DescendingExamples) {
  for (int n = 1; n <= 5; ++n) {
    const int k = 2 * n + 1;
    EXPECT_EQ(descending_index(n, 0, k), 2 * n + 1);
    EXPECT_EQ(descending_index(n, 2 * n - 1, k), 2);
    if (n >= 2) {   // n = 1: member 1 is also member n
      EXPECT_EQ(descending_index(1, 2 * n - 1, k), 1);
    }
  }
  EXPECT_THROW(descending_index(2, 0, 4), RangeError);   // k = 2n has n-1 descending members
  EXPECT_THROW(descending_index(1, -1, 5), RangeError);
}

TEST(Schedules, MonotoneUntilSaturation) {
  for (int k = 2; k <= 11; ++k) {
    const int n = chain_n(k);
    for (int m = 1; m <= ascending_members(k); ++m) {
      for (int j = 1; j <= 2 * n - 1; ++j) {
        const int prev = ascending_index(m, j - 1, k), cur = ascending_index(m, j, k);
        EXPECT_EQ(cur, prev == k ? k : prev + 1);
      }
      EXPECT_LE(ascending_index(m, 2 * n - 1, k), k);
    }
    for (int q = 1; q <= descending_members(k); ++q)
      for (int j = 1; j <= 2 * n - 1; ++j) {
        const int prev = descending_index(q, j - 1, k), cur = descending_index(q, j, k);
        EXPECT_EQ(cur, prev == 1 ? 1 : prev - 1);
      }
  }
}

TEST(Schedules, LayerExponents) {
  EXPECT_EQ(layer_exponent(1, 3).to_string(), "-t1/2");
  EXPECT_EQ(layer_exponent(2, 3).to_string(), "t1/2");
  EXPECT_EQ(layer_exponent(4, 3).to_string(), "t2/2");
  EXPECT_EQ(layer_exponent(5, 3).to_string(), "-t3/2");
  EXPECT_THROW(layer_exponent(0, 3), RangeError);
  EXPECT_THROW(layer_exponent(6, 3), RangeError);
}

TEST(BuildChain, ShortestChain) {
  const auto c = build_chain(Family::ASCENDING, 1, 3);
  EXPECT_EQ(pretty_print(c.lhs), "A3^{r-t1}");
  EXPECT_EQ(pretty_print(c.rhs), "(A3^{r/2} (A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2} A3^{r/2})^{w1}");
  EXPECT_EQ(c.relation, Relation::GE);
  EXPECT_TRUE(c.rhs.is_palindromic());
}

TEST(BuildChain, ThreeLayerDisplays) {
  // n = 3 (k = 7): ascending member 3 and the last two descending members.
  EXPECT_EQ(pretty_print(build_chain(Family::ASCENDING, 3, 7)),
            "A7^{r-t3} >= (A7^{r/2} (A7^{-t3/2} (A7^{t2/2} (A6^{-t2/2} (A5^{t1/2} (A4^{-t1/2} A3^{p1} A4^{-t1/2})^{p2} "
            "A5^{t1/2})^{p3} A6^{-t2/2})^{p4} A7^{t2/2})^{p5} A7^{-t3/2})^{p6} A7^{r/2})^{w3}");
  EXPECT_EQ(pretty_print(build_chain(Family::DESCENDING, 2, 7)),
            "A1^{r-t3} <= (A1^{r/2} (A1^{-t3/2} (A2^{t2/2} (A3^{-t2/2} (A4^{t1/2} (A5^{-t1/2} A6^{p1} A5^{-t1/2})^{p2} "
            "A4^{t1/2})^{p3} A3^{-t2/2})^{p4} A2^{t2/2})^{p5} A1^{-t3/2})^{p6} A1^{r/2})^{w5}");
  EXPECT_EQ(pretty_print(build_chain(Family::DESCENDING, 3, 7)),
            "A1^{r-t3} <= (A1^{r/2} (A2^{-t3/2} (A3^{t2/2} (A4^{-t2/2} (A5^{t1/2} (A6^{-t1/2} A7^{p1} A6^{-t1/2})^{p2} "
            "A5^{t1/2})^{p3} A4^{-t2/2})^{p4} A3^{t2/2})^{p5} A2^{-t3/2})^{p6} A1^{r/2})^{w6}");
}

TEST(BuildChain, EvenCapSaturatesAtTwoN) {
  for (int n = 1; n <= 4; ++n) {
    const auto c = build_chain(Family::ASCENDING, n, 2 * n);
    EXPECT_EQ(c.lhs.max_index(), 2 * n);
    EXPECT_EQ(c.rhs.max_index(), 2 * n);
  }
}

TEST(BuildChain, OuterIndexAndRelation) {
  for (int k = 2; k <= 9; ++k)
    for (const auto& c : hypothesis_set(k)) {
      const int outer = c.family == Family::ASCENDING ? k : 1;
      ASSERT_TRUE(c.lhs.is_symbol());
      EXPECT_EQ(c.lhs.as_symbol().index, outer);
      EXPECT_EQ(c.relation, c.family == Family::ASCENDING ? Relation::GE : Relation::LE);
      EXPECT_TRUE(c.rhs.is_palindromic());
      EXPECT_LE(c.rhs.max_index(), k);
    }
}

TEST(BuildChain, MemberRange) {
  EXPECT_THROW(build_chain(Family::ASCENDING, 3, 5), RangeError);
  EXPECT_THROW(build_chain(Family::DESCENDING, 2, 4), RangeError);
  EXPECT_THROW(build_chain(Family::DESCENDING, 0, 5), RangeError);
  EXPECT_THROW(build_chain(Family::ASCENDING, 1, 1), RangeError);
}

TEST(HypothesisSet, Counts) {
  EXPECT_EQ(hypothesis_set(3).size(), 2u);
  EXPECT_EQ(hypothesis_set(5).size(), 4u);
  EXPECT_EQ(hypothesis_set(4).size(), 3u);
  EXPECT_EQ(hypothesis_set(2).size(), 1u);
  for (int k = 2; k <= 12; ++k) EXPECT_EQ(static_cast<int>(hypothesis_set(k).size()), k - 1);
  const auto hs = hypothesis_set(5);
  for (std::size_t i = 0; i < hs.size(); ++i) EXPECT_EQ(hs[i].ordinal, static_cast<int>(i) + 1);
}

TEST(Dsl, ParseSymbol) {
  const auto w = parse_word("A1^{p1}");
  ASSERT_TRUE(w.is_symbol());
  EXPECT_EQ(w.as_symbol().index, 1);
  EXPECT_EQ(w.as_symbol().exponent, ScalarExpr::name("p1"));
  EXPECT_EQ(parse_word("A12").as_symbol().exponent, ScalarExpr::literal(1));
}

TEST(Dsl, ParseInnermostSandwich) {
  const auto w = parse_word("(A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2}");
  ASSERT_TRUE(w.is_power());
  EXPECT_EQ(w.as_power().exponent, ScalarExpr::name("p2"));
  const auto& prod = w.as_power().base->as_product();
  ASSERT_EQ(prod.factors.size(), 3u);
  EXPECT_EQ(prod.factors[0], OperatorWord::symbol(2, ScalarExpr::name("t1", true, 2.0)));
  EXPECT_EQ(prod.factors[1], OperatorWord::symbol(1, ScalarExpr::name("p1")));
}

TEST(Dsl, ScalarForms) {
  for (const char* e : {"r-t2", "r/2", "-t3/2", "w4", "0.5", "-1.25", "3/4", "r-t1+0.5", "1e-05"}) {
    const std::string src = std::string("A1^{") + e + "}";
    EXPECT_EQ(pretty_print(parse_word(src)), src) << e;
  }
  EXPECT_DOUBLE_EQ(parse_word("A1^{r-t2/2+1.5}").as_symbol().exponent.resolve({{"r", 2.0}, {"t2", 1.0}}), 3.0);
}

TEST(Dsl, ParseErrorsCarryPositions) {
  try {
    parse("A1^{p1} A2^{q1}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 13);
  }
  try {
    parse("A1 >=\n (A2^{p1}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse("B1"), ParseError);
  EXPECT_THROW(parse("A0"), ParseError);
  EXPECT_THROW(parse("A1^{}"), ParseError);
  EXPECT_THROW(parse("A1^p1"), ParseError);
  EXPECT_THROW(parse("A1 >= A2 >= A3"), ParseError);
  EXPECT_THROW(parse("()"), ParseError);
  EXPECT_THROW(parse("A1^{p0}"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse_chain("A1 A2"), ParseError);
}

TEST(Dsl, ChainParsesToBuilderOutput) {
  for (int k = 2; k <= 9; ++k)
    for (const auto& c : hypothesis_set(k)) {
      const auto parsed = parse_chain(pretty_print(c));
      EXPECT_EQ(parsed.lhs, c.lhs);
      EXPECT_EQ(parsed.rhs, c.rhs);
      EXPECT_EQ(parsed.relation, c.relation);
    }
}

TEST(Dsl, GoldenFilesMatchBuilder) {
  struct Case {
    const char* file;
    int k;
  };
  for (const Case c : {Case{"theorem_2_1_n2.txt", 5}, Case{"theorem_2_2_n2.txt", 4}, Case{"theorem_2_1_n1.txt", 3}}) {
    const auto entries = parse_golden(read_file(std::string(OPLAB_GOLDEN_DIR) + "/" + c.file));
    const auto hyps = hypothesis_set(c.k);
    ASSERT_EQ(entries.size(), hyps.size()) << c.file;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      EXPECT_EQ(normalize_whitespace(pretty_print(hyps[i])), entries[i].text) << c.file << " line " << entries[i].line;
      EXPECT_EQ(entries[i].chain.rhs, hyps[i].rhs);
    }
  }
}

TEST(Dsl, GoldenCommentsAndWhitespace) {
  const auto e = parse_golden("# header\n\n  A3^{r-t1}   >=  (A3^{r/2}\tA1^{p1} A3^{r/2})^{w1}  # trailing\n");
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].line, 3);
  EXPECT_EQ(e[0].text, "A3^{r-t1} >= (A3^{r/2} A1^{p1} A3^{r/2})^{w1}");
}

TEST(Dsl, RoundTripOnGeneratedWords) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto w = testutil::random_word(rng, 4);
    const auto text = pretty_print(w);
    EXPECT_EQ(parse_word(text), w) << text;
    EXPECT_EQ(pretty_print(parse_word(text)), text);
  }
}

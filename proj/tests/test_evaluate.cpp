#include "oplab/chain.hpp"
#include "oplab/dsl.hpp"
#include "oplab/evaluate.hpp"
#include "oplab/matrix_io.hpp"
#include "oplab/verifier/tuple.hpp"
#include "test_util.hpp"
#include "word_gen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace oplab;

namespace {

using Bindings = std::map<std::string, double>;

Environment<double> env_of(std::vector<RealMatrix> ms, Bindings b = {}) {
  return Environment<double>::from_sequence(ms, std::move(b));
}

double rel_diff(const Dense<double>& a, const Dense<double>& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST(Environment, Lookup) {
  const auto env = env_of({RealMatrix::identity(2)}, {{"p1", 2.0}});
  EXPECT_EQ(env.dim(), 2);
  EXPECT_EQ(env.scalar("p1"), 2.0);
  EXPECT_THROW(env.scalar("p2"), UnboundName);
  EXPECT_THROW(env.matrix(2), UnboundName);
  EXPECT_THROW(env_of({RealMatrix::identity(2), RealMatrix::identity(3)}), DimensionMismatch);
}

TEST(Evaluate, Examples) {
  const auto r = evaluate(parse_word("A1^{p1}"), env_of({RealMatrix::diagonal({2})}, {{"p1", 3.0}}));
  EXPECT_DOUBLE_EQ(r(0, 0), 8.0);
}

TEST(Evaluate, IdentityAbsorbsEveryPower) {
  const auto c = build_chain(Family::ASCENDING, 1, 5);
  std::vector<RealMatrix> ms(5, RealMatrix::identity(3));
  const auto ps = ParamSet::make(5, {0.3, 0.7}, {1.5, 2, 4, 8}, 1.2, {0.4, 0.4, 0.4, 0.4});
  const auto r = evaluate(c.rhs, env_of(ms, ps.bindings()));
  EXPECT_LE((r.dense() - Dense<double>::Identity(3, 3)).norm(), 1e-12);
}

TEST(Evaluate, ScalarChainExample) {
  const auto c = build_chain(Family::ASCENDING, 1, 3);
  const auto env = env_of({RealMatrix::diagonal({2}), RealMatrix::diagonal({1}), RealMatrix::diagonal({3})},
                          {{"t1", 0.5}, {"r", 1.0}, {"p1", 1.0}, {"p2", 1.0}, {"w1", 0.5}, {"w2", 0.5}});
  EXPECT_NEAR(evaluate(c.rhs, env)(0, 0), std::sqrt(6.0), 1e-14);
  EXPECT_NEAR(evaluate(c.lhs, env)(0, 0), std::sqrt(3.0), 1e-14);
}

TEST(Evaluate, UnboundNamesAndSymbols) {
  const auto env = env_of({RealMatrix::identity(2)}, {{"p1", 1.0}});
  EXPECT_THROW(evaluate(parse_word("A1^{p2}"), env), UnboundName);
  EXPECT_THROW(evaluate(parse_word("A2^{p1}"), env), UnboundName);
}

TEST(Evaluate, NearSingularPropagates) {
  const auto env = env_of({RealMatrix::diagonal({0.0, 1.0})});
  EXPECT_THROW(evaluate(parse_word("A1^{-0.5}"), env), NearSingular);
  EXPECT_THROW(evaluate(parse_word("A1^{0.5}"), env), NearSingular);
  EXPECT_NO_THROW(evaluate(parse_word("A1^{2}"), env));
}

TEST(Evaluate, NonHermitianProductIsRejectedButAvailableDense) {
  std::mt19937_64 rng(3);
  const auto a = testutil::random_spd(3, rng), b = testutil::random_spd(3, rng);
  const auto env = env_of({a, b});
  EXPECT_THROW(evaluate(parse_word("A1 A2"), env), NotHermitian);
  EXPECT_LE(rel_diff(evaluate_dense(parse_word("A1 A2"), env), a.dense() * b.dense()), 1e-14);
  EXPECT_THROW(evaluate(parse_word("(A1 A2)^{0.5}"), env), ConsistencyError);
  EXPECT_NO_THROW(evaluate(parse_word("(A1 A2 A1)^{0.5}"), env));
}

TEST(Evaluate, IntegerPowersMatchRepeatedProducts) {
  std::mt19937_64 rng(5);
  for (int dim = 2; dim <= 4; ++dim)
    for (int n = 1; n <= 4; ++n) {
      const auto a = testutil::random_spd(dim, rng), b = testutil::random_spd(dim, rng);
      const auto env = env_of({a, b}, {{"p1", static_cast<double>(n)}});
      const Dense<double> x = evaluate(parse_word("A1^{0.5} A2 A1^{0.5}"), env).dense();
      Dense<double> expect = Dense<double>::Identity(dim, dim);
      for (int i = 0; i < n; ++i) expect = expect * x;
      EXPECT_LE(rel_diff(evaluate(parse_word("(A1^{0.5} A2 A1^{0.5})^{p1}"), env).dense(), expect), 1e-8);
    }
}

TEST(Evaluate, ProductIsMultiplicative) {
  std::mt19937_64 rng(7);
  const auto a = testutil::random_spd(3, rng), b = testutil::random_spd(3, rng), c = testutil::random_spd(3, rng);
  const auto env = env_of({a, b, c});
  const Dense<double> abc = a.dense() * b.dense() * c.dense();
  EXPECT_LE(rel_diff(evaluate_dense(parse_word("A1 A2 A3"), env), abc), 1e-14);
  EXPECT_LE(rel_diff(evaluate_dense(parse_word("(A1 A2) A3"), env), abc), 1e-14);
}

TEST(Evaluate, DiagonalEnvironmentMatchesScalarWalk) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(0.2, 3.0), ut(0.05, 0.95), up(1.0, 3.0);
  for (int rep = 0; rep < 60; ++rep) {
    const int k = 3 + rep % 3, n = chain_n(k), dim = 1 + rep % 4;
    std::vector<std::vector<double>> diag(k, std::vector<double>(dim));
    std::vector<RealMatrix> ms;
    for (auto& d : diag) {
      for (auto& x : d) x = ua(rng);
      ms.push_back(RealMatrix::diagonal(d));
    }
    std::vector<double> t(n), p(2 * n);
    for (auto& x : t) x = ut(rng);
    for (auto& x : p) x = up(rng);
    const auto ps = ParamSet::make(k, t, p, t.back() + 0.5, std::vector<double>(k - 1, 0.3));
    const auto b = ps.bindings();
    const auto env = env_of(ms, b);
    WordEvaluator<double> ev;
    for (const auto& c : hypothesis_set(k)) {
      const auto r = ev.evaluate(c.rhs, env);
      for (int i = 0; i < dim; ++i) {
        std::vector<double> a;
        for (const auto& d : diag) a.push_back(d[i]);
        const double expect = testutil::scalar_eval(c.rhs, a, b);
        EXPECT_NEAR(r(i, i), expect, 1e-10 * std::abs(expect));
      }
      EXPECT_LE(r.dense().norm() - r.dense().diagonal().norm(), 1e-12 * r.dense().norm());
    }
  }
}

TEST(Evaluate, CacheRespectsScalarsAndMatrices) {
  const auto word = parse_word("(A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2}");
  WordEvaluator<double> ev;
  const auto e1 = env_of({RealMatrix::diagonal({2}), RealMatrix::diagonal({3})}, {{"t1", 1.0}, {"p1", 1.0}, {"p2", 1.0}});
  EXPECT_NEAR(ev.evaluate(word, e1)(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(ev.evaluate(word, e1.with_scalars({{"t1", 1.0}, {"p1", 2.0}, {"p2", 1.0}}))(0, 0), 4.0 / 3.0, 1e-15);
  const auto e2 = env_of({RealMatrix::diagonal({5}), RealMatrix::diagonal({3})}, {{"t1", 1.0}, {"p1", 1.0}, {"p2", 1.0}});
  EXPECT_NEAR(ev.evaluate(word, e2)(0, 0), 5.0 / 3.0, 1e-15);
}

TEST(Evaluate, EscalatesOnIllConditionedWords) {
  // kappa(A1) = 1e4, so (A1^{p1})^{p2} at p1 = p2 = 4 spans 1e64.
  const auto env = env_of({RealMatrix::diagonal({1e-2, 1e2})}, {{"p1", 4.0}, {"p2", 4.0}});
  WordEvaluator<double> ev;
  const auto r = ev.evaluate(parse_word("((A1^{p1})^{p2})^{0.0625}"), env);
  EXPECT_GT(ev.last_tier(), 0);
  EXPECT_NEAR(r(0, 0), 1e-2, 1e-15);
  EXPECT_NEAR(r(1, 1), 1e2, 1e-11);
}

TEST(Evaluate, TierChoiceAgreesWithForcedPrecision) {
  // Margins of the hypothesis family on ordered tuples, with the automatic
  // tier choice and with at least 80 digits throughout.
  EvalOptions forced;
  forced.min_tier = 2;
  for (int inst = 0; inst < 6; ++inst) {
    const int k = 3 + inst % 3, n = chain_n(k);
    const auto tuple = gen_ordered_tuple(k, 2 + inst % 3, 100 + inst);
    std::vector<double> t(n, 0.6), p(2 * n, 2.0);
    p.back() = 4.0;
    ParamSet ps{n, k, t, p, 1.1, std::vector<double>(k - 1, 1.0)};
    ps.w.assign(k - 1, necessity_weight(ps));
    const auto env = tuple.environment(ps.bindings());
    WordEvaluator<double> automatic, precise(forced);
    for (const auto& c : hypothesis_set(k)) {
      const auto a = automatic.evaluate(c.rhs, env);
      const auto b = precise.evaluate(c.rhs, env);
      EXPECT_LE(rel_diff(a.dense(), b.dense()), 1e-10) << "instance " << inst << " ordinal " << c.ordinal;
    }
  }
}

TEST(Evaluate, ComplexFieldAgreesWithRealOnRealData) {
  std::mt19937_64 rng(13);
  const auto a = testutil::random_spd(3, rng), b = testutil::random_spd(3, rng);
  const auto word = parse_word("(A1^{0.5} A2^{1.5} A1^{0.5})^{0.3}");
  const auto real = evaluate(word, env_of({a, b}));
  using C = std::complex<double>;
  const auto cenv = Environment<C>::from_sequence(
      {ComplexMatrix(a.dense().cast<C>()), ComplexMatrix(b.dense().cast<C>())}, {});
  const auto cplx = evaluate(word, cenv);
  EXPECT_LE((cplx.dense().real() - real.dense()).norm(), 1e-12 * real.dense().norm());
  EXPECT_LE(cplx.dense().imag().norm(), 1e-12 * real.dense().norm());
}

TEST(Evaluate, ComplexWordMatchesDirectFunctionalCalculus) {
  const auto t = gen_ordered_tuple<std::complex<double>>(2, 3, 9);
  const auto word = parse_word("(A1^{0.5} A2^{1.5} A1^{0.5})^{0.3}");
  const auto via_words = evaluate(word, t.environment());
  const auto h = matrix_power(t[1], 0.5);
  const auto inner = congruence(h, matrix_power(t[2], 1.5));
  const auto direct = matrix_power(inner, 0.3);
  EXPECT_LE((via_words.dense() - direct.dense()).norm(), 1e-11 * direct.dense().norm());
  EXPECT_GT(t[2].dense().imag().norm(), 0.1);
}

TEST(MatrixIo, RoundTripReal) {
  std::mt19937_64 rng(17);
  const auto a = testutil::random_spd(3, rng);
  const auto j = to_json(a);
  EXPECT_EQ(j.at("field"), "real");
  EXPECT_EQ(matrix_from_json<double>(j), a);
}

TEST(MatrixIo, RoundTripComplex) {
  const auto t = gen_ordered_tuple<std::complex<double>>(2, 2, 3);
  EXPECT_EQ(matrix_from_json<std::complex<double>>(to_json(t[1])), t[1]);
  EXPECT_THROW(matrix_from_json<double>(to_json(t[1])), RangeError);
}

TEST(MatrixIo, Errors) {
  using nlohmann::json;
  EXPECT_THROW(matrix_from_json<double>(json{{"dim", 2}, {"entries", {1, 2, 3}}}), RangeError);
  EXPECT_THROW(matrix_from_json<double>(json{{"dim", 2}, {"field", "quaternion"}, {"entries", {1, 0, 0, 1}}}), RangeError);
  EXPECT_THROW(matrix_from_json<double>(json{{"entries", {1}}}), RangeError);
  EXPECT_THROW(matrix_from_json<double>(json{{"dim", 2}, {"entries", {1, 2, 3, 4}}}), NotHermitian);
  const auto m = matrix_from_json<double>(json{{"dim", 2}, {"entries", {2, 1, 1, 3}}});
  EXPECT_EQ(m(0, 1), 1.0);
}

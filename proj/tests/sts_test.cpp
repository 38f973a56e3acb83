#include "whitekit/sts.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "whitekit/store.hpp"

namespace whitekit {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

TEST(CosineScores, HandCases) {
  Matrix l(3, 2), r(3, 2);
  l << 1, 2, 1, 0, 1, 1;
  r << 1, 2, 0, 3, 1, 0;
  const Vector s = cosine_scores({l, r, vec({1, 2, 3})});
  EXPECT_DOUBLE_EQ(s(0), 1.0);
  EXPECT_DOUBLE_EQ(s(1), 0.0);
  EXPECT_NEAR(s(2), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(CosineScores, ZeroRowIsNamed) {
  Matrix l(2, 2), r(2, 2);
  l << 1, 0, 1, 1;
  r << 1, 0, 0, 0;
  try {
    cosine_scores({l, r, vec({1, 2})});
    FAIL();
  } catch (const DegenerateEmbedding& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(CosineScores, PositiveRowScalingInvariant) {
  std::mt19937_64 rng(1);
  const Matrix l = testing::gaussian(20, 5, rng), r = testing::gaussian(20, 5, rng);
  std::uniform_real_distribution<double> c(0.1, 10.0);
  Matrix ls = l, rs = r;
  for (Index i = 0; i < 20; ++i) {
    ls.row(i) *= c(rng);
    rs.row(i) *= c(rng);
  }
  const Vector gold = Vector::LinSpaced(20, 0, 1);
  EXPECT_LT((cosine_scores({l, r, gold}) - cosine_scores({ls, rs, gold})).cwiseAbs().maxCoeff(),
            1e-14);
}

TEST(Spearman, HandCases) {
  EXPECT_DOUBLE_EQ(spearman(vec({1, 2, 3}), vec({10, 20, 30})), 1.0);
  EXPECT_DOUBLE_EQ(spearman(vec({1, 2, 3}), vec({3, 2, 1})), -1.0);
  // Ranks of a are 1, 2.5, 2.5, 4; the value is 4.5 / sqrt(4.5 * 5).
  EXPECT_EQ(average_ranks(vec({1, 2, 2, 3})), vec({1, 2.5, 2.5, 4}));
  EXPECT_NEAR(spearman(vec({1, 2, 2, 3}), vec({1, 3, 2, 4})), 0.9486832980505138, 1e-15);
}

TEST(Spearman, Errors) {
  EXPECT_THROW(spearman(vec({1, 1, 1}), vec({1, 2, 3})), UndefinedCorrelation);
  EXPECT_THROW(spearman(vec({1}), vec({1})), InvalidInput);
  EXPECT_THROW(spearman(vec({1, 2}), vec({1, 2, 3})), InvalidInput);
}

TEST(Spearman, MatchesBruteForceWithTies) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> len(2, 50), val(0, 9);
  int checked = 0;
  while (checked < 200) {
    const int n = len(rng);
    Vector a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a(i) = val(rng);
      b(i) = val(rng);
    }
    if (a.minCoeff() == a.maxCoeff() || b.minCoeff() == b.maxCoeff()) continue;
    EXPECT_NEAR(spearman(a, b), testing::brute_force_spearman(to_std(a), to_std(b)), 1e-12);
    ++checked;
  }
}

TEST(Spearman, Properties) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector a = testing::gaussian(25, 1, rng).col(0);
    const Vector b = testing::gaussian(25, 1, rng).col(0);
    EXPECT_EQ(spearman(a, b), spearman(b, a));
    EXPECT_DOUBLE_EQ(spearman(a, a), 1.0);
    const Vector fa = a.array().exp() * 3.0 + 1.0;
    const Vector fb = b.array().cube();
    EXPECT_EQ(spearman(fa, fb), spearman(a, b));
  }
}

TEST(EvaluateSts, PerfectAndReversedGold) {
  std::mt19937_64 rng(4);
  SentencePairSet pairs{testing::gaussian(30, 6, rng), testing::gaussian(30, 6, rng), Vector()};
  pairs.gold = Vector::Zero(30);
  pairs.gold = cosine_scores({pairs.left, pairs.right, pairs.gold});
  EXPECT_DOUBLE_EQ(evaluate_sts(pairs).spearman_x100, 100.0);
  pairs.gold = -pairs.gold;
  EXPECT_DOUBLE_EQ(evaluate_sts(pairs).spearman_x100, -100.0);
  EXPECT_EQ(evaluate_sts(pairs).n_pairs, 30);
  EXPECT_FALSE(evaluate_sts(pairs).whitening_applied.has_value());
}

TEST(EvaluateSts, IdentityWhiteningIsBitwiseNoOp) {
  std::mt19937_64 rng(5);
  SentencePairSet pairs{testing::gaussian(40, 5, rng), testing::gaussian(40, 5, rng),
                        testing::gaussian(40, 1, rng).col(0)};
  WhiteningModel identity;
  identity.kind = WhiteningKind::zca;
  identity.mean = Vector::Zero(5);
  identity.w = Matrix::Identity(5, 5);
  const auto raw = evaluate_sts(pairs);
  const auto same = evaluate_sts(pairs, &identity);
  EXPECT_EQ(raw.spearman_x100, same.spearman_x100);
  ASSERT_TRUE(same.whitening_applied.has_value());
}

TEST(EvaluateSts, WhiteningRecoversSignalMaskedBySharedDirection) {
  SynthSpec spec;
  spec.task = TaskType::sts;
  spec.n = 1000;
  spec.d = 32;
  spec.anisotropy = 30.0;
  spec.seed = 6;
  const auto pairs = std::get<SentencePairSet>(synth_data(spec));
  const double raw = evaluate_sts(pairs).spearman_x100;
  for (WhiteningKind k : kAllWhiteningKinds) {
    const auto model = fit_pair_whitening(pairs, {k, 1e-8, FitScope::all_data});
    const double white = evaluate_sts(pairs, &model).spearman_x100;
    EXPECT_GT(white, raw + 10.0) << to_string(k) << " raw " << raw << " white " << white;
  }
}

TEST(EvaluateSts, DimensionMismatch) {
  SentencePairSet pairs{Matrix::Ones(3, 2), Matrix::Ones(3, 2), vec({1, 2, 3})};
  WhiteningModel m;
  m.mean = Vector::Zero(3);
  m.w = Matrix::Identity(3, 3);
  EXPECT_THROW(evaluate_sts(pairs, &m), InvalidInput);
  SentencePairSet bad{Matrix::Ones(3, 2), Matrix::Ones(2, 2), vec({1, 2, 3})};
  EXPECT_THROW(evaluate_sts(bad), InvalidInput);
}

}  // namespace
}  // namespace whitekit

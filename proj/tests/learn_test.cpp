#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tapmein/error.hpp"
#include "tapmein/learn/classifier.hpp"
#include "tapmein/learn/forest.hpp"
#include "tapmein/learn/grid_search.hpp"
#include "tapmein/learn/standardizer.hpp"
#include "tapmein/learn/svm.hpp"

namespace {

using namespace tapmein;

// Two Gaussian blobs in `dims` dimensions whose centres are `gap` apart on
// the first axis.
void Blobs(std::size_t pos, std::size_t neg, std::size_t dims, double gap, std::uint64_t seed,
           Matrix& x, std::vector<int>& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 0.3);
  x.clear();
  y.clear();
  for (std::size_t i = 0; i < pos + neg; ++i) {
    const int label = i < pos ? 1 : -1;
    std::vector<double> row(dims);
    for (auto& v : row) v = noise(rng);
    row[0] += label * gap / 2;
    x.push_back(row);
    y.push_back(label);
  }
}

TEST(Standardizer, TwoRowColumn) {
  const Standardizer s = Standardizer::Fit({{0.0}, {2.0}});
  EXPECT_EQ(s.mean()[0], 1.0);
  EXPECT_EQ(s.scale()[0], 1.0);
  EXPECT_EQ(s.Apply(std::vector<double>{0.0})[0], -1.0);
  EXPECT_EQ(s.Apply(std::vector<double>{2.0})[0], 1.0);
}

TEST(Standardizer, ConstantColumnAndMean) {
  const Standardizer s = Standardizer::Fit({{5, 1}, {5, 3}, {5, 8}});
  EXPECT_EQ(s.scale()[0], 1.0);
  for (const auto& row : s.ApplyAll({{5, 1}, {5, 3}})) EXPECT_EQ(row[0], 0.0);
  for (double z : s.Apply(s.mean())) EXPECT_NEAR(z, 0.0, 1e-15);
}

TEST(Standardizer, RoundTripAndErrors) {
  Matrix x;
  std::vector<int> y;
  Blobs(15, 15, 6, 3, 1, x, y);
  for (auto& row : x) row[2] *= 1000;
  const Standardizer s = Standardizer::Fit(x);
  for (const auto& row : x) {
    const auto back = s.Inverse(s.Apply(row));
    for (std::size_t j = 0; j < row.size(); ++j) EXPECT_NEAR(back[j], row[j], 1e-9);
  }
  EXPECT_THROW(Standardizer::Fit({}), Error);
  EXPECT_THROW(s.Apply(std::vector<double>{1.0}), Error);
}

TEST(Svm, SeparablePairLinear) {
  const Matrix x{{-1.0}, {1.0}};
  const std::vector<int> y{-1, 1};
  SvmParams p;
  p.c = 1;
  p.kernel = {KernelKind::kLinear, 0};
  const SvmModel m = TrainSvm(x, y, p);
  EXPECT_GT(m.Score(std::vector<double>{1.0}), 0);
  EXPECT_LT(m.Score(std::vector<double>{-1.0}), 0);
  EXPECT_NEAR(m.Score(std::vector<double>{0.0}), 0.0, 1e-9);
  EXPECT_TRUE(m.converged);
}

TEST(Svm, RbfTwentyPoints) {
  Matrix x;
  std::vector<int> y;
  Blobs(10, 10, 2, 4, 3, x, y);
  SvmParams p;
  p.c = 10;
  p.kernel = {KernelKind::kRbf, 0.5};
  const SvmDualSolution sol = SolveSvmDual(x, y, p);
  const auto audit = oracle::AuditSvm(x, y, sol, p.c, p.kernel);
  EXPECT_EQ(audit.misclassified, 0u);
  EXPECT_LE(audit.worst_violation, p.tolerance);
  EXPECT_LE(std::abs(audit.dual_sum), 1e-6);

  const SvmModel m = TrainSvm(x, y, p);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(m.Score(x[i]) > 0, y[i] > 0);
  // A positive support vector scores on the genuine side.
  for (std::size_t k = 0; k < m.dual_coef.size(); ++k) {
    if (m.dual_coef[k] > 0) {
      EXPECT_GT(m.Score(m.support_vectors[k]), 0);
    }
  }
  EXPECT_THROW(m.Score(std::vector<double>{1.0, 2.0, 3.0}), Error);
}

TEST(Svm, KernelIdentity) {
  const Kernel k{KernelKind::kRbf, 0.7};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(-100, 100);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> v(8);
    for (auto& e : v) e = val(rng);
    EXPECT_EQ(k(v, v), 1.0);
  }
}

TEST(Svm, SingleClass) {
  const Matrix x{{0.0}, {1.0}};
  const std::vector<int> y{1, 1};
  try {
    TrainSvm(x, y, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClassTraining);
  }
}

TEST(Forest, ImportanceConcentrates) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> row(6);
    for (auto& v : row) v = u(rng);
    const int label = i % 3 == 0 ? 1 : -1;
    row[4] = label > 0 ? 1.0 + u(rng) : -u(rng);
    x.push_back(row);
    y.push_back(label);
  }
  ForestParams p;
  p.tree_count = 50;
  p.seed = 12;
  const ForestModel f = TrainForest(x, y, p);
  double total = 0;
  for (std::size_t j = 0; j < f.importance.size(); ++j) {
    total += f.importance[j];
    if (j != 4) {
      EXPECT_GT(f.importance[4], f.importance[j]);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  for (const auto& row : x) {
    const double s = f.Score(row);
    EXPECT_TRUE(s >= 0 && s <= 1);
  }
}

TEST(Forest, StumpOnPair) {
  const Matrix x{{-1.0}, {1.0}};
  const std::vector<int> y{-1, 1};
  ForestParams p;
  p.tree_count = 1;
  p.max_depth = 1;
  const ForestModel f = TrainForest(x, y, p);
  EXPECT_EQ(f.Score(x[1]), 1.0);
  EXPECT_EQ(f.Score(x[0]), 0.0);
}

TEST(Forest, SeedDeterminism) {
  Matrix x;
  std::vector<int> y;
  Blobs(10, 30, 5, 1.5, 4, x, y);
  ForestParams p;
  p.tree_count = 20;
  p.seed = 99;
  const ForestModel a = TrainForest(x, y, p), b = TrainForest(x, y, p);
  EXPECT_EQ(a.importance, b.importance);
  ASSERT_EQ(a.trees.size(), b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    ASSERT_EQ(a.trees[t].nodes.size(), b.trees[t].nodes.size());
    for (std::size_t n = 0; n < a.trees[t].nodes.size(); ++n) {
      EXPECT_EQ(a.trees[t].nodes[n].feature, b.trees[t].nodes[n].feature);
      EXPECT_EQ(a.trees[t].nodes[n].threshold, b.trees[t].nodes[n].threshold);
    }
  }
}

DecisionTree Leaf(std::uint32_t genuine, std::uint32_t impostor) {
  DecisionTree t;
  TreeNode n;
  n.genuine = genuine;
  n.impostor = impostor;
  t.nodes.push_back(n);
  return t;
}

TEST(Forest, VoteCounting) {
  ForestModel f;
  f.feature_count = 1;
  const std::vector<double> x{0.0};
  f.trees = {Leaf(3, 0), Leaf(3, 0), Leaf(3, 0), Leaf(3, 0)};
  EXPECT_EQ(f.Score(x), 1.0);
  f.trees = {Leaf(0, 2), Leaf(0, 2), Leaf(0, 2), Leaf(0, 2)};
  EXPECT_EQ(f.Score(x), 0.0);
  f.trees = {Leaf(3, 1), Leaf(2, 0), Leaf(1, 4), Leaf(5, 2)};
  EXPECT_EQ(f.Score(x), 0.75);
  f.trees = {Leaf(2, 2)};
  EXPECT_EQ(f.Score(x), 0.0);
  EXPECT_THROW(f.Score(std::vector<double>{1, 2}), Error);
}

TEST(Grid, SingleCandidate) {
  Matrix x;
  std::vector<int> y;
  Blobs(6, 12, 3, 3, 2, x, y);
  HyperGrid g;
  g.svm = {{3.0, 0.2, KernelKind::kRbf}};
  const auto r = GridSearch(x, y, ClassifierKind::kSvm, g, 1);
  EXPECT_EQ(std::get<SvmCandidate>(r.best), g.svm[0]);
  ASSERT_EQ(r.evaluated.size(), 1u);
  EXPECT_EQ(r.evaluated[0].total, x.size());
}

TEST(Grid, TieGoesToCanonicalFirst) {
  Matrix x;
  std::vector<int> y;
  Blobs(6, 12, 3, 10, 2, x, y);
  HyperGrid g;
  g.svm = {{10.0, 0.1, KernelKind::kRbf}, {1.0, 0.1, KernelKind::kRbf}};
  const auto r = GridSearch(x, y, ClassifierKind::kSvm, g, 1);
  ASSERT_EQ(r.evaluated[0].correct, r.evaluated[1].correct);
  EXPECT_EQ(std::get<SvmCandidate>(r.best).c, 1.0);

  g.forest = {{100, 0, 1}, {50, 8, 1}, {50, 0, 1}};
  const auto ordered = CanonicalOrder(g.forest);
  EXPECT_EQ(ordered[0], (ForestCandidate{50, 8, 1}));
  EXPECT_EQ(ordered[1], (ForestCandidate{50, 0, 1}));
  EXPECT_EQ(ordered[2], (ForestCandidate{100, 0, 1}));
}

TEST(Grid, ModerateGammaBeatsMemorizer) {
  Matrix x;
  std::vector<int> y;
  Blobs(10, 20, 4, 3, 6, x, y);
  HyperGrid g;
  g.svm = {{1.0, 1e4, KernelKind::kRbf}, {1.0, 0.1, KernelKind::kRbf}};
  const auto r = GridSearch(x, y, ClassifierKind::kSvm, g, 5);
  const auto& moderate = r.evaluated[0];  // canonical: ascending gamma
  const auto& huge = r.evaluated[1];
  EXPECT_EQ(std::get<SvmCandidate>(moderate.candidate).gamma, 0.1);
  EXPECT_GE(moderate.correct, huge.correct);
  if (moderate.correct > huge.correct) {
    EXPECT_EQ(std::get<SvmCandidate>(r.best).gamma, 0.1);
  }
}

TEST(Grid, StratifiedFoldsBalanced) {
  std::vector<int> y(10, 1);
  y.resize(40, -1);
  const auto folds = StratifiedFolds(y, 3, 4);
  std::size_t pos[3] = {}, neg[3] = {};
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] > 0 ? pos : neg)[folds[i]]++;
  for (int f = 0; f < 3; ++f) {
    EXPECT_GE(pos[f], 3u);
    EXPECT_LE(pos[f], 4u);
    EXPECT_GE(neg[f], 10u);
    EXPECT_LE(neg[f], 10u);
  }
  EXPECT_EQ(folds, StratifiedFolds(y, 3, 4));
}

TEST(Grid, DefaultGridAndGamma) {
  const HyperGrid g = HyperGrid::Default();
  EXPECT_EQ(g.svm.size(), 16u);
  EXPECT_EQ(g.forest.size(), 4u);
  EXPECT_DOUBLE_EQ(ResolveGamma({1.0, 0.0, KernelKind::kRbf}, 59), 1.0 / 59);
  EXPECT_EQ(ResolveGamma({1.0, 0.1, KernelKind::kRbf}, 59), 0.1);
}

}  // namespace

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tapmein/learn/standardizer.hpp"

namespace tapmein {

struct ForestParams {
  std::size_t tree_count = 100;
  std::size_t max_depth = 0;           // 0 = unlimited
  std::size_t min_leaf = 1;
  std::size_t features_per_split = 0;  // 0 = ceil(sqrt(m))
  std::uint64_t seed = 0;
};

/// Flat node array; node 0 is the root. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  std::uint32_t genuine = 0;   // bootstrap rows reaching this node, by class
  std::uint32_t impostor = 0;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  // Majority class of the reached leaf; ties vote impostor.
  bool VotesGenuine(std::span<const double> x) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::vector<double> importance;  // per feature, sums to 1 if any split exists
  std::size_t feature_count = 0;

  // Fraction of trees voting genuine. Throws Error(kDimensionMismatch).
  double Score(std::span<const double> x) const;
};

// Labels are -1 / +1. Trees are grown with Gini impurity on class-stratified
// bootstrap resamples. Throws kSingleClassTraining, kDimensionMismatch.
ForestModel TrainForest(const Matrix& x, std::span<const int> y,
                        const ForestParams& params);

}  // namespace tapmein

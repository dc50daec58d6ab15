#include "tapmein/learn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tapmein/error.hpp"
#include "tapmein/random.hpp"

namespace tapmein {

namespace {

double Gini(double pos, double neg) {
  const double n = pos + neg;
  if (n <= 0.0) return 0.0;
  const double p = pos / n, q = neg / n;
  return 1.0 - p * p - q * q;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;  // weighted impurity decrease, unnormalized
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, const ForestParams& params,
              std::size_t features_per_split, Rng& rng,
              std::vector<double>& importance)
      : x_(x), y_(y), params_(params), mtry_(features_per_split), rng_(rng),
        importance_(importance) {}

  DecisionTree Build(std::vector<std::size_t> rows) {
    total_ = static_cast<double>(rows.size());
    Grow(rows, 0);
    return std::move(tree_);
  }

 private:
  int Grow(std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::uint32_t pos = 0, neg = 0;
    for (std::size_t r : rows) (y_[r] == 1 ? pos : neg)++;
    tree_.nodes[id].genuine = pos;
    tree_.nodes[id].impostor = neg;

    const bool depth_reached = params_.max_depth > 0 && depth >= params_.max_depth;
    if (pos == 0 || neg == 0 || depth_reached || rows.size() < 2 * params_.min_leaf) {
      return id;
    }
    const Split split = FindSplit(rows, pos, neg);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (x_[r][split.feature] <= split.threshold ? left : right).push_back(r);
    }
    importance_[split.feature] += split.decrease / total_;
    rows.clear();
    rows.shrink_to_fit();

    const int l = Grow(left, depth + 1);
    const int r = Grow(right, depth + 1);
    TreeNode& node = tree_.nodes[id];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  Split FindSplit(const std::vector<std::size_t>& rows, std::uint32_t pos,
                  std::uint32_t neg) {
    const std::size_t m = x_.front().size();
    std::vector<std::size_t> features(m);
    std::iota(features.begin(), features.end(), 0);
    std::shuffle(features.begin(), features.end(), rng_);

    const double n = static_cast<double>(rows.size());
    const double parent = Gini(pos, neg);
    Split best;
    std::vector<std::pair<double, int>> column(rows.size());
    std::size_t examined = 0;
    for (std::size_t f : features) {
      if (examined >= mtry_) break;
      for (std::size_t k = 0; k < rows.size(); ++k) column[k] = {x_[rows[k]][f], y_[rows[k]]};
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;  // constant here
      ++examined;

      double lp = 0.0, ln = 0.0;
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        (column[k].second == 1 ? lp : ln) += 1.0;
        if (column[k].first == column[k + 1].first) continue;
        const double nl = static_cast<double>(k + 1);
        const double nr = n - nl;
        if (nl < static_cast<double>(params_.min_leaf) ||
            nr < static_cast<double>(params_.min_leaf)) {
          continue;
        }
        const double rp = pos - lp, rn = neg - ln;
        const double decrease =
            n * parent - nl * Gini(lp, ln) - nr * Gini(rp, rn);
        if (decrease > best.decrease + 1e-12) {
          best.feature = static_cast<int>(f);
          best.threshold = column[k].first + (column[k + 1].first - column[k].first) / 2.0;
          best.decrease = decrease;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  const ForestParams& params_;
  std::size_t mtry_;
  Rng& rng_;
  std::vector<double>& importance_;
  DecisionTree tree_;
  double total_ = 1.0;
};

}  // namespace

bool DecisionTree::VotesGenuine(std::span<const double> x) const {
  int id = 0;
  while (!nodes[id].is_leaf()) {
    const TreeNode& node = nodes[id];
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[id].genuine > nodes[id].impostor;
}

double ForestModel::Score(std::span<const double> x) const {
  if (x.size() != feature_count) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(feature_count) + " features, got " +
                    std::to_string(x.size()));
  }
  if (trees.empty()) return 0.0;
  std::size_t votes = 0;
  for (const DecisionTree& t : trees) votes += t.VotesGenuine(x) ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(trees.size());
}

ForestModel TrainForest(const Matrix& x, std::span<const int> y,
                        const ForestParams& params) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "row/label count mismatch");
  }
  if (x.empty()) throw Error(ErrorCode::kSingleClassTraining, "no training rows");
  const std::size_t m = x.front().size();
  std::vector<std::size_t> pos_rows, neg_rows;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != m) throw Error(ErrorCode::kDimensionMismatch, "ragged feature matrix");
    if (y[i] == 1) {
      pos_rows.push_back(i);
    } else if (y[i] == -1) {
      neg_rows.push_back(i);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "labels must be -1 or +1");
    }
  }
  if (pos_rows.empty() || neg_rows.empty()) {
    throw Error(ErrorCode::kSingleClassTraining, "training set has one class");
  }
  if (params.tree_count < 1 || params.min_leaf < 1) {
    throw Error(ErrorCode::kInvalidArgument, "tree_count and min_leaf must be >= 1");
  }

  const std::size_t mtry =
      params.features_per_split > 0
          ? std::min(params.features_per_split, m)
          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));

  ForestModel model;
  model.feature_count = m;
  model.importance.assign(m, 0.0);
  model.trees.reserve(params.tree_count);
  for (std::size_t t = 0; t < params.tree_count; ++t) {
    Rng rng = MakeStream(params.seed, {t});
    // Per-class resampling keeps both classes in every tree.
    std::vector<std::size_t> rows;
    rows.reserve(x.size());
    for (const auto* group : {&pos_rows, &neg_rows}) {
      std::uniform_int_distribution<std::size_t> pick(0, group->size() - 1);
      for (std::size_t k = 0; k < group->size(); ++k) rows.push_back((*group)[pick(rng)]);
    }
    TreeBuilder builder(x, y, params, mtry, rng, model.importance);
    model.trees.push_back(builder.Build(std::move(rows)));
  }
  const double total = std::accumulate(model.importance.begin(), model.importance.end(), 0.0);
  if (total > 0.0)
    for (double& v : model.importance) v /= total;
  return model;
}

}  // namespace tapmein

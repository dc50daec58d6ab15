#include "tapmein/learn/grid_search.hpp"

#include <algorithm>

#include "tapmein/error.hpp"
#include "tapmein/random.hpp"

namespace tapmein {

std::vector<std::size_t> StratifiedFolds(std::span<const int> y, std::size_t folds,
                                         std::uint64_t seed) {
  std::vector<std::size_t> assignment(y.size(), 0);
  Rng rng = MakeStream(seed, {0xf01d});
  for (int label : {1, -1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == label) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k) assignment[idx[k]] = k % folds;
  }
  return assignment;
}

GridSearchResult GridSearch(const Matrix& x, std::span<const int> y,
                            ClassifierKind kind, const HyperGrid& grid,
                            std::uint64_t seed) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "row/label count mismatch");
  }
  const std::size_t m = x.empty() ? 0 : x.front().size();
  std::vector<Candidate> candidates;
  if (kind == ClassifierKind::kSvm) {
    for (const auto& c : CanonicalOrder(grid.svm, m)) candidates.emplace_back(c);
  } else {
    for (const auto& c : CanonicalOrder(grid.forest)) candidates.emplace_back(c);
  }
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "empty grid");

  const std::vector<std::size_t> fold_of = StratifiedFolds(y, kCvFolds, seed);
  const double threshold = NativeThreshold(kind);

  GridSearchResult result;
  std::size_t best_correct = 0;
  bool have_best = false;
  for (const Candidate& cand : candidates) {
    CandidateResult cr{cand, 0, 0};
    for (std::size_t fold = 0; fold < kCvFolds; ++fold) {
      Matrix train_x, test_x;
      std::vector<int> train_y, test_y;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (fold_of[i] == fold) {
          test_x.push_back(x[i]);
          test_y.push_back(y[i]);
        } else {
          train_x.push_back(x[i]);
          train_y.push_back(y[i]);
        }
      }
      if (test_x.empty()) continue;
      const Model model = TrainCandidate(train_x, train_y, cand, StreamSeed(seed, {fold}));
      for (std::size_t i = 0; i < test_x.size(); ++i) {
        const int predicted = ScoreModel(model, test_x[i]) >= threshold ? 1 : -1;
        if (predicted == test_y[i]) ++cr.correct;
        ++cr.total;
      }
    }
    if (!have_best || cr.correct > best_correct) {
      result.best = cand;
      best_correct = cr.correct;
      have_best = true;
    }
    result.evaluated.push_back(std::move(cr));
  }
  return result;
}

}  // namespace tapmein

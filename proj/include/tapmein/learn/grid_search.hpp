#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tapmein/learn/classifier.hpp"

namespace tapmein {

inline constexpr std::size_t kCvFolds = 3;

struct CandidateResult {
  Candidate candidate;
  std::size_t correct = 0;  // summed over held-out folds
  std::size_t total = 0;

  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
};

struct GridSearchResult {
  Candidate best;
  std::vector<CandidateResult> evaluated;  // in canonical order
};

// Per-class shuffled round-robin fold assignment.
std::vector<std::size_t> StratifiedFolds(std::span<const int> y, std::size_t folds,
                                         std::uint64_t seed);

// 3-fold stratified CV accuracy per candidate; highest wins, earliest in
// canonical order on ties. Throws kInvalidArgument on an empty grid.
GridSearchResult GridSearch(const Matrix& x, std::span<const int> y,
                            ClassifierKind kind, const HyperGrid& grid,
                            std::uint64_t seed);

}  // namespace tapmein
